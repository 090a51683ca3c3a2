//! Radial pair potentials with extended-real values and stability metadata.
//!
//! A potential maps a distance r > 0 to an energy V(r) that may be +∞ (hard
//! core) but never −∞. The Boltzmann factor convention e^{−β·(+∞)} = 0 is
//! applied explicitly rather than through floating-point infinities, so the
//! Mayer factor on a hard core is exactly −1.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Add;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PotentialError {
    #[error("stability constant unknown: {0} requires a user-supplied value")]
    MissingStability(String),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("unknown potential family `{0}`")]
    UnknownFamily(String),
    #[error("unknown parameter `{0}` for family `{1}`")]
    UnknownParameter(String, String),
    #[error("configuration point {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("configuration is empty")]
    EmptyConfiguration,
    #[error("coordinates must be finite")]
    NonFiniteCoordinate,
    #[error("box half-width must be positive and finite")]
    BadBox,
}

/// Extended-real energy: finite, or +∞ on a hard core. −∞ never occurs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Energy {
    Finite(f64),
    Infinite,
}

impl Energy {
    /// Wrap a raw value, mapping +∞ overflow to `Infinite`. NaN and −∞ are
    /// construction bugs and panic.
    pub fn finite(v: f64) -> Self {
        assert!(!v.is_nan(), "energy values are never NaN");
        assert!(v != f64::NEG_INFINITY, "energies are bounded below");
        if v == f64::INFINITY {
            Energy::Infinite
        } else {
            Energy::Finite(v)
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Energy::Infinite)
    }

    /// V ≥ 0, with +∞ counting as non-negative.
    pub fn is_nonnegative(self) -> bool {
        match self {
            Energy::Finite(v) => v >= 0.0,
            Energy::Infinite => true,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Energy::Finite(v) => v,
            Energy::Infinite => f64::INFINITY,
        }
    }

    pub fn abs(self) -> Energy {
        match self {
            Energy::Finite(v) => Energy::Finite(v.abs()),
            Energy::Infinite => Energy::Infinite,
        }
    }

    /// e^{−βV}, exactly 0 on a hard core.
    pub fn boltzmann(self, beta: f64) -> f64 {
        match self {
            Energy::Finite(v) => (-beta * v).exp(),
            Energy::Infinite => 0.0,
        }
    }

    /// Mayer factor e^{−βV} − 1 ∈ [−1, ∞), exactly −1 on a hard core.
    pub fn mayer(self, beta: f64) -> f64 {
        match self {
            Energy::Finite(v) => (-beta * v).exp_m1(),
            Energy::Infinite => -1.0,
        }
    }

    /// 1 − e^{−β|V|} ∈ [0, 1], exactly 1 on a hard core.
    pub fn hat_factor(self, beta: f64) -> f64 {
        match self {
            Energy::Finite(v) => -(-beta * v.abs()).exp_m1(),
            Energy::Infinite => 1.0,
        }
    }
}

impl Add for Energy {
    type Output = Energy;

    fn add(self, rhs: Energy) -> Energy {
        match (self, rhs) {
            (Energy::Finite(a), Energy::Finite(b)) => Energy::finite(a + b),
            _ => Energy::Infinite,
        }
    }
}

impl Eq for Energy {}

impl PartialOrd for Energy {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Energy {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Energy::Infinite, Energy::Infinite) => Equal,
            (Energy::Infinite, Energy::Finite(_)) => Greater,
            (Energy::Finite(_), Energy::Infinite) => Less,
            (Energy::Finite(a), Energy::Finite(b)) => {
                a.partial_cmp(b).expect("energy values are never NaN")
            }
        }
    }
}

impl fmt::Display for Energy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Energy::Finite(v) => write!(f, "{v}"),
            Energy::Infinite => write!(f, "+inf"),
        }
    }
}

/// Where a stability constant came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilitySource {
    /// Published value (e.g. 8.61 for the Lennard-Jones potential) or the
    /// trivial B = 0 of a non-negative potential.
    Literature,
    UserSupplied,
}

/// B ≥ 0 such that the total pair energy of any n points is ≥ −Bn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstant {
    pub value: f64,
    pub source: StabilitySource,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialForm {
    /// V(r) = r⁻¹² − 2r⁻⁶, with minimum −1 at r = 1 and zero at 2^{−1/6}.
    LennardJones,
    /// +∞ for r < a, 0 beyond.
    HardSphere { diameter: f64 },
    /// Hard core of radius `core`, then −depth out to `range`, then 0.
    SquareWell { core: f64, depth: f64, range: f64 },
    /// V(r) = r^{−exponent}; tempered only when exponent > dimension.
    InversePower { exponent: f64 },
    /// V ≡ 0.
    Zero,
}

/// A radial pair interaction plus the metadata the bounds engine needs.
#[derive(Clone, Debug, PartialEq)]
pub struct PairPotential {
    name: String,
    form: PotentialForm,
    dimension: usize,
    stability: Option<StabilityConstant>,
}

impl PairPotential {
    pub fn lennard_jones() -> Self {
        PairPotential {
            name: "lennard-jones".into(),
            form: PotentialForm::LennardJones,
            dimension: 3,
            stability: Some(StabilityConstant {
                value: 8.61,
                source: StabilitySource::Literature,
            }),
        }
    }

    pub fn hard_sphere(diameter: f64) -> Result<Self, PotentialError> {
        require_positive("diameter", diameter)?;
        Ok(PairPotential {
            name: "hard-sphere".into(),
            form: PotentialForm::HardSphere { diameter },
            dimension: 3,
            stability: Some(StabilityConstant {
                value: 0.0,
                source: StabilitySource::Literature,
            }),
        })
    }

    /// A square well requires an explicit stability constant: unlike the
    /// non-negative families there is no trivial B, and we never compute one.
    pub fn square_well(
        core: f64,
        depth: f64,
        range: f64,
        stability: Option<f64>,
    ) -> Result<Self, PotentialError> {
        require_positive("core", core)?;
        require_positive("depth", depth)?;
        require_positive("range", range)?;
        if range <= core {
            return Err(PotentialError::InvalidParameter {
                name: "range".into(),
                reason: "must exceed the core radius".into(),
            });
        }
        let b = stability.ok_or_else(|| PotentialError::MissingStability("square-well".into()))?;
        let stability = Some(validated_stability(b, StabilitySource::UserSupplied)?);
        Ok(PairPotential {
            name: "square-well".into(),
            form: PotentialForm::SquareWell { core, depth, range },
            dimension: 3,
            stability,
        })
    }

    pub fn inverse_power(exponent: f64) -> Result<Self, PotentialError> {
        Self::inverse_power_dim(exponent, 3)
    }

    pub fn inverse_power_dim(exponent: f64, dimension: usize) -> Result<Self, PotentialError> {
        require_positive("exponent", exponent)?;
        if exponent <= dimension as f64 {
            return Err(PotentialError::InvalidParameter {
                name: "exponent".into(),
                reason: format!("must exceed the dimension {dimension} for a tempered tail"),
            });
        }
        Ok(PairPotential {
            name: "inverse-power".into(),
            form: PotentialForm::InversePower { exponent },
            dimension,
            stability: Some(StabilityConstant {
                value: 0.0,
                source: StabilitySource::Literature,
            }),
        })
    }

    pub fn zero() -> Self {
        PairPotential {
            name: "zero".into(),
            form: PotentialForm::Zero,
            dimension: 3,
            stability: Some(StabilityConstant {
                value: 0.0,
                source: StabilitySource::Literature,
            }),
        }
    }

    pub fn with_dimension(mut self, dimension: usize) -> Result<Self, PotentialError> {
        if dimension == 0 {
            return Err(PotentialError::InvalidParameter {
                name: "dimension".into(),
                reason: "must be at least 1".into(),
            });
        }
        if let PotentialForm::InversePower { exponent } = self.form {
            if exponent <= dimension as f64 {
                return Err(PotentialError::InvalidParameter {
                    name: "exponent".into(),
                    reason: format!("must exceed the dimension {dimension} for a tempered tail"),
                });
            }
        }
        self.dimension = dimension;
        Ok(self)
    }

    pub fn with_stability(mut self, value: f64) -> Result<Self, PotentialError> {
        self.stability = Some(validated_stability(value, StabilitySource::UserSupplied)?);
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn form(&self) -> &PotentialForm {
        &self.form
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn stability(&self) -> Option<StabilityConstant> {
        self.stability
    }

    /// Stability constant value, or an error naming the family.
    pub fn stability_value(&self) -> Result<f64, PotentialError> {
        self.stability
            .map(|s| s.value)
            .ok_or_else(|| PotentialError::MissingStability(self.name.clone()))
    }

    /// True when V(r) ≥ 0 for all r.
    pub fn is_nonnegative(&self) -> bool {
        matches!(
            self.form,
            PotentialForm::HardSphere { .. }
                | PotentialForm::InversePower { .. }
                | PotentialForm::Zero
        )
    }

    /// V(r). Distances r = 0 are allowed: families unbounded at the origin
    /// return +∞ there.
    pub fn evaluate_radial(&self, r: f64) -> Energy {
        debug_assert!(r >= 0.0 && !r.is_nan());
        match self.form {
            PotentialForm::LennardJones => {
                if r == 0.0 {
                    return Energy::Infinite;
                }
                let r6 = r.powi(-6);
                Energy::finite(r6 * r6 - 2.0 * r6)
            }
            PotentialForm::HardSphere { diameter } => {
                if r < diameter {
                    Energy::Infinite
                } else {
                    Energy::Finite(0.0)
                }
            }
            PotentialForm::SquareWell { core, depth, range } => {
                if r < core {
                    Energy::Infinite
                } else if r < range {
                    Energy::Finite(-depth)
                } else {
                    Energy::Finite(0.0)
                }
            }
            PotentialForm::InversePower { exponent } => {
                if r == 0.0 {
                    return Energy::Infinite;
                }
                Energy::finite(r.powf(-exponent))
            }
            PotentialForm::Zero => Energy::Finite(0.0),
        }
    }

    /// Radius of the hard core (0 when there is none): V ≡ +∞ on [0, r).
    pub fn hard_core_radius(&self) -> f64 {
        match self.form {
            PotentialForm::HardSphere { diameter } => diameter,
            PotentialForm::SquareWell { core, .. } => core,
            _ => 0.0,
        }
    }

    /// Radii where V crosses zero, as quadrature hints.
    pub fn sign_change_radii(&self) -> Vec<f64> {
        match self.form {
            PotentialForm::LennardJones => vec![2f64.powf(-1.0 / 6.0)],
            _ => Vec::new(),
        }
    }

    /// Radius beyond which |V| is non-increasing and the closed-form tail
    /// moment below is valid.
    pub fn temperedness_radius(&self) -> f64 {
        match self.form {
            PotentialForm::LennardJones => 1.0,
            PotentialForm::HardSphere { diameter } => diameter,
            PotentialForm::SquareWell { range, .. } => range,
            PotentialForm::InversePower { .. } => 1.0,
            PotentialForm::Zero => 0.0,
        }
    }

    /// Structural radii (sign changes, discontinuities, minima) where the
    /// radial quadrature must split a panel.
    pub(crate) fn quad_breakpoints(&self) -> Vec<f64> {
        match self.form {
            PotentialForm::LennardJones => vec![2f64.powf(-1.0 / 6.0), 1.0],
            PotentialForm::SquareWell { range, .. } => vec![range],
            _ => Vec::new(),
        }
    }

    /// ∫_R^∞ |V(r)| r^{d−1} dr in closed form, valid for
    /// R ≥ temperedness_radius(). `None` only if the tail diverges, which the
    /// constructors already rule out.
    pub(crate) fn tail_abs_moment(&self, r: f64, d: usize) -> Option<f64> {
        let d = d as f64;
        match self.form {
            PotentialForm::LennardJones => {
                // |V| = 2r⁻⁶ − r⁻¹² for r ≥ 1
                Some(2.0 * r.powf(d - 6.0) / (6.0 - d) - r.powf(d - 12.0) / (12.0 - d))
            }
            PotentialForm::HardSphere { .. } | PotentialForm::Zero => Some(0.0),
            PotentialForm::SquareWell { depth, range, .. } => {
                if r >= range {
                    Some(0.0)
                } else {
                    Some(depth * (range.powf(d) - r.powf(d)) / d)
                }
            }
            PotentialForm::InversePower { exponent } => {
                if exponent <= d {
                    None
                } else {
                    Some(r.powf(d - exponent) / (exponent - d))
                }
            }
        }
    }
}

fn require_positive(name: &str, v: f64) -> Result<(), PotentialError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(PotentialError::InvalidParameter {
            name: name.into(),
            reason: "must be positive and finite".into(),
        })
    }
}

fn validated_stability(
    value: f64,
    source: StabilitySource,
) -> Result<StabilityConstant, PotentialError> {
    if !value.is_finite() || value < 0.0 {
        return Err(PotentialError::InvalidParameter {
            name: "stability_constant".into(),
            reason: "must be finite and non-negative".into(),
        });
    }
    Ok(StabilityConstant { value, source })
}

/// Declarative form of a potential, as it appears in run-config documents.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
}

impl PotentialSpec {
    pub fn new(family: &str) -> Self {
        PotentialSpec {
            family: family.into(),
            name: None,
            parameters: BTreeMap::new(),
            stability_constant: None,
            dimension: None,
        }
    }

    pub fn with_parameter(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.into(), value);
        self
    }

    /// Validate and construct the potential. Unknown parameter keys are
    /// rejected rather than ignored.
    pub fn build(&self) -> Result<PairPotential, PotentialError> {
        let get = |key: &str, default: f64| -> f64 {
            self.parameters.get(key).copied().unwrap_or(default)
        };
        let allow = |keys: &[&str]| -> Result<(), PotentialError> {
            for k in self.parameters.keys() {
                if !keys.contains(&k.as_str()) {
                    return Err(PotentialError::UnknownParameter(
                        k.clone(),
                        self.family.clone(),
                    ));
                }
            }
            Ok(())
        };
        let mut p = match self.family.as_str() {
            "lennard-jones" | "lj" => {
                allow(&[])?;
                PairPotential::lennard_jones()
            }
            "hard-sphere" => {
                allow(&["diameter"])?;
                PairPotential::hard_sphere(get("diameter", 1.0))?
            }
            "square-well" => {
                allow(&["core", "depth", "range"])?;
                PairPotential::square_well(
                    get("core", 1.0),
                    get("depth", 1.0),
                    get("range", 1.5),
                    self.stability_constant,
                )?
            }
            "inverse-power" => {
                allow(&["exponent"])?;
                PairPotential::inverse_power_dim(
                    get("exponent", 12.0),
                    self.dimension.unwrap_or(3),
                )?
            }
            "zero" => {
                allow(&[])?;
                PairPotential::zero()
            }
            other => return Err(PotentialError::UnknownFamily(other.into())),
        };
        if let Some(d) = self.dimension {
            p = p.with_dimension(d)?;
        }
        if self.family != "square-well" {
            if let Some(b) = self.stability_constant {
                p = p.with_stability(b)?;
            }
        }
        if let Some(name) = &self.name {
            p.name = name.clone();
        }
        Ok(p)
    }
}

/// Specs for the built-in families with their default parameters. The
/// square-well entry deliberately carries no stability constant; building it
/// without one is an error.
pub fn builtin_registry() -> Vec<PotentialSpec> {
    vec![
        PotentialSpec::new("lennard-jones"),
        PotentialSpec::new("hard-sphere").with_parameter("diameter", 1.0),
        PotentialSpec::new("square-well")
            .with_parameter("core", 1.0)
            .with_parameter("depth", 1.0)
            .with_parameter("range", 1.5),
        PotentialSpec::new("inverse-power").with_parameter("exponent", 12.0),
        PotentialSpec::new("zero"),
    ]
}

/// Find the registry spec with the given family name.
pub fn lookup_builtin(family: &str) -> Option<PotentialSpec> {
    let family = if family == "lj" { "lennard-jones" } else { family };
    builtin_registry().into_iter().find(|s| s.family == family)
}

/// n labeled points in ℝ^d, optionally confined to the box [−L, L]^d.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    points: Vec<Vec<f64>>,
    box_half_width: Option<f64>,
}

impl Configuration {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self, PotentialError> {
        if points.is_empty() {
            return Err(PotentialError::EmptyConfiguration);
        }
        let d = points[0].len();
        for (index, p) in points.iter().enumerate() {
            if p.len() != d || d == 0 {
                return Err(PotentialError::DimensionMismatch {
                    index,
                    got: p.len(),
                    expected: d.max(1),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(PotentialError::NonFiniteCoordinate);
            }
        }
        Ok(Configuration {
            points,
            box_half_width: None,
        })
    }

    pub fn with_box(mut self, half_width: f64) -> Result<Self, PotentialError> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(PotentialError::BadBox);
        }
        self.box_half_width = Some(half_width);
        Ok(self)
    }

    /// n points drawn uniformly from [−L, L]^d.
    pub fn random_in_box<R: Rng>(n: usize, d: usize, half_width: f64, rng: &mut R) -> Self {
        let points = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| rng.random_range(-half_width..=half_width))
                    .collect()
            })
            .collect();
        Configuration {
            points,
            box_half_width: Some(half_width),
        }
    }

    /// All n points at the origin: every pair distance is 0.
    pub fn coincident(n: usize, d: usize) -> Self {
        Configuration {
            points: vec![vec![0.0; d]; n],
            box_half_width: None,
        }
    }

    /// Points on a planar integer lattice embedded in ℝ³ (many tied
    /// distances), scaled by `spacing`.
    pub fn square_lattice(n: usize, spacing: f64) -> Self {
        let side = (n as f64).sqrt().ceil() as usize;
        let points = (0..n)
            .map(|k| {
                let (i, j) = (k / side, k % side);
                vec![i as f64 * spacing, j as f64 * spacing, 0.0]
            })
            .collect();
        Configuration {
            points,
            box_half_width: None,
        }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn box_half_width(&self) -> Option<f64> {
        self.box_half_width
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn translated(&self, shift: &[f64]) -> Result<Self, PotentialError> {
        if shift.len() != self.dim() {
            return Err(PotentialError::DimensionMismatch {
                index: 0,
                got: shift.len(),
                expected: self.dim(),
            });
        }
        let points = self
            .points
            .iter()
            .map(|p| p.iter().zip(shift).map(|(a, s)| a + s).collect())
            .collect();
        Ok(Configuration {
            points,
            box_half_width: self.box_half_width,
        })
    }

    /// Reorder points as points[perm[k]]; perm must be a permutation of 0..n.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n());
        let points = perm.iter().map(|&k| self.points[k].clone()).collect();
        Configuration {
            points,
            box_half_width: self.box_half_width,
        }
    }
}

/// V(x_i − x_j) for two points of a configuration; symmetric in (i, j).
pub fn pair_energy(
    p: &PairPotential,
    c: &Configuration,
    i: usize,
    j: usize,
) -> Result<Energy, PotentialError> {
    assert!(i != j, "pair energy needs two distinct points");
    if c.dim() != p.dimension() {
        return Err(PotentialError::DimensionMismatch {
            index: 0,
            got: c.dim(),
            expected: p.dimension(),
        });
    }
    Ok(p.evaluate_radial(c.distance(i, j)))
}

/// Mayer factor e^{−βV(x_i−x_j)} − 1.
pub fn mayer_factor(
    p: &PairPotential,
    beta: f64,
    i: usize,
    j: usize,
    c: &Configuration,
) -> Result<f64, PotentialError> {
    Ok(pair_energy(p, c, i, j)?.mayer(beta))
}
