//! Radial potential families and the effective 1D potential per mode.
//!
//! The operator under study is u'' = (Q(rho) + E) u on [rho0, inf) with
//!
//!   Q(rho) = e^(-2 rho) (1 + e^(-rho) B(rho)) zeta  - V0(rho) + a V1(rho) + e^(-rho) X(rho)
//!
//! where (V0, V1) is one of three built-in families: a power law
//! c rho^(delta-2), the inverse-square threshold c rho^-2, or the
//! iterated-log refinement of the 1/4 threshold. B and X are bounded
//! user callables with declared sup bounds.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

pub type BoundedCallable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A bounded perturbation callable with its declared sup bound.
#[derive(Clone)]
pub struct Perturbation {
    f: Option<BoundedCallable>,
    sup: f64,
}

impl Perturbation {
    pub fn zero() -> Self {
        Perturbation { f: None, sup: 0.0 }
    }

    pub fn new(f: BoundedCallable, sup: f64) -> Result<Self> {
        if !(sup >= 0.0) || !sup.is_finite() {
            return Err(Error::InvalidSpec(
                "perturbation sup bound must be finite and >= 0".into(),
            ));
        }
        Ok(Perturbation { f: Some(f), sup })
    }

    pub fn sup(&self) -> f64 {
        self.sup
    }

    pub fn eval(&self, rho: f64) -> f64 {
        match &self.f {
            None => 0.0,
            Some(f) => f(rho),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.f.is_none()
    }
}

impl fmt::Debug for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.f.is_none() {
            write!(f, "0")
        } else {
            write!(f, "callable(sup = {})", self.sup)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// V0 = c rho^(delta-2), delta < 2, delta != 0.
    PowerLaw { c: f64, delta: f64 },
    /// V0 = c rho^-2.
    Critical { c: f64 },
    /// V0 = 1/4 rho^-2 + 1/4 sum_{j<depth} G_j + c_n G_depth, where
    /// G_j(rho) = rho^-2 (log rho)^-2 ... (log_(j) rho)^-2.
    IteratedLog { depth: u32, c_n: f64 },
}

impl Family {
    /// log depth used by the compressed coordinate: log_(depth+1) rho.
    pub fn log_depth(&self) -> u32 {
        match self {
            Family::PowerLaw { .. } | Family::Critical { .. } => 0,
            Family::IteratedLog { depth, .. } => *depth,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Family::PowerLaw { c, delta } => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::InvalidSpec("power law needs c > 0".into()));
                }
                if !(delta < 2.0) || !delta.is_finite() {
                    return Err(Error::InvalidSpec("power law needs delta < 2".into()));
                }
                if delta == 0.0 {
                    return Err(Error::InvalidSpec(
                        "delta = 0 degenerates the compressed coordinate; use the Critical family"
                            .into(),
                    ));
                }
                Ok(())
            }
            Family::Critical { c } => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::InvalidSpec("critical family needs c > 0".into()));
                }
                Ok(())
            }
            Family::IteratedLog { depth, c_n } => {
                if depth < 1 {
                    return Err(Error::InvalidSpec("iterated log needs depth >= 1".into()));
                }
                if depth > 2 {
                    return Err(Error::InvalidSpec(
                        "iterated log depth > 2 puts the base point beyond double range".into(),
                    ));
                }
                if !(c_n > 0.0) || !c_n.is_finite() {
                    return Err(Error::InvalidSpec("iterated log needs c_N > 0".into()));
                }
                Ok(())
            }
        }
    }
}

/// Boundary condition at the base point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Dirichlet,
    Neumann,
}

impl fmt::Display for Bc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bc::Dirichlet => write!(f, "dirichlet"),
            Bc::Neumann => write!(f, "neumann"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PotentialSpec {
    pub family: Family,
    /// Perturbation amplitude multiplying V1.
    pub a: f64,
    /// Log damping exponent in V1.
    pub eps: f64,
    /// B(rho) inside q(rho) = 1 + e^(-rho) B(rho).
    pub b: Perturbation,
    /// Additive e^(-rho) X(rho).
    pub x: Perturbation,
    rho0: f64,
    rho0_is_user: bool,
}

/// j-fold iterated natural logarithm. Errors when any intermediate value
/// (including the result) fails to stay positive, naming the failing depth.
pub fn iter_log(j: u32, rho: f64) -> Result<f64> {
    if j == 0 {
        return Ok(rho);
    }
    let mut v = rho;
    for depth in 1..=j {
        if !(v > 0.0) {
            return Err(Error::LogDomain { depth, value: v });
        }
        v = v.ln();
        if !(v > 0.0) && depth < j {
            return Err(Error::LogDomain {
                depth: depth + 1,
                value: v,
            });
        }
    }
    if !(v > 0.0) {
        Err(Error::LogDomain { depth: j, value: v })
    } else {
        Ok(v)
    }
}

/// Chain of iterated logs log_(1..=j) rho without the positivity contract;
/// used by coordinate transforms where negative deep logs are legitimate.
pub(crate) fn log_chain(j: u32, rho: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(j as usize);
    let mut v = rho;
    for _ in 0..j {
        v = v.ln();
        out.push(v);
    }
    out
}

/// Smallest rho with log_(j) rho > 1 for all j <= depth + 1; the natural
/// domain floor for a family of the given log depth.
pub fn domain_floor(log_depth: u32) -> f64 {
    let mut v = 1.0f64;
    for _ in 0..=log_depth {
        v = v.exp();
    }
    v
}

impl PotentialSpec {
    /// Build with an automatically certified base point.
    pub fn auto(family: Family, a: f64, eps: f64, b: Perturbation, x: Perturbation) -> Result<Self> {
        family.validate()?;
        validate_scalars(a, eps)?;
        let rho0 = auto_rho0(family, a, eps, b.sup(), x.sup())?;
        Ok(PotentialSpec {
            family,
            a,
            eps,
            b,
            x,
            rho0,
            rho0_is_user: false,
        })
    }

    /// Build with a user-supplied base point. The potential must be finite on
    /// [rho0, inf); log-damped terms additionally need log rho0 > 0.
    pub fn with_rho0(
        family: Family,
        a: f64,
        eps: f64,
        b: Perturbation,
        x: Perturbation,
        rho0: f64,
    ) -> Result<Self> {
        family.validate()?;
        validate_scalars(a, eps)?;
        if !(rho0 > 0.0) || !rho0.is_finite() {
            return Err(Error::InvalidSpec("rho0 must be positive and finite".into()));
        }
        let depth = family.log_depth();
        if depth >= 1 {
            // every log entering G_depth must be defined and nonzero
            let chain = log_chain(depth, rho0);
            if chain.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::InvalidSpec(format!(
                    "iterated-log family needs log_(j) rho0 > 0 for j <= {depth}; got rho0 = {rho0}"
                )));
            }
        }
        if a != 0.0 && rho0.ln() <= 0.0 {
            return Err(Error::InvalidSpec(
                "a nonzero log-damped perturbation needs log rho0 > 0".into(),
            ));
        }
        Ok(PotentialSpec {
            family,
            a,
            eps,
            b,
            x,
            rho0,
            rho0_is_user: true,
        })
    }

    /// Convenience: built-in family with no perturbations, auto base point.
    pub fn bare(family: Family) -> Result<Self> {
        Self::auto(family, 0.0, 1.0, Perturbation::zero(), Perturbation::zero())
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    pub fn rho0_is_user(&self) -> bool {
        self.rho0_is_user
    }

    /// -V0(rho) + a V1(rho).
    pub fn eval_v(&self, rho: f64) -> Result<f64> {
        if rho < self.rho0 {
            return Err(Error::InvalidSpec(format!(
                "rho = {rho} below the base point {}",
                self.rho0
            )));
        }
        let v1 = if self.a == 0.0 {
            0.0
        } else {
            self.v1_raw(rho)?
        };
        Ok(-self.v0_raw(rho)? + self.a * v1)
    }

    fn v0_raw(&self, rho: f64) -> Result<f64> {
        match self.family {
            Family::PowerLaw { c, delta } => Ok(c * rho.powf(delta - 2.0)),
            Family::Critical { c } => Ok(c / (rho * rho)),
            Family::IteratedLog { depth, c_n } => {
                let chain = log_chain(depth, rho);
                if chain.iter().any(|v| *v == 0.0 || !v.is_finite()) {
                    return Err(Error::LogDomain {
                        depth,
                        value: *chain.last().expect("depth >= 1"),
                    });
                }
                // G_j = rho^-2 prod_{i<=j} (log_(i) rho)^-2, accumulated inline
                let mut g = 1.0 / (rho * rho);
                let mut v0 = 0.25 * g;
                for (j, lj) in chain.iter().enumerate() {
                    g /= lj * lj;
                    let coef = if j + 1 == depth as usize { c_n } else { 0.25 };
                    v0 += coef * g;
                }
                Ok(v0)
            }
        }
    }

    /// V1 without the amplitude: family decay times (log rho)^-eps.
    fn v1_raw(&self, rho: f64) -> Result<f64> {
        let l1 = rho.ln();
        if !(l1 > 0.0) {
            return Err(Error::LogDomain { depth: 1, value: l1 });
        }
        let damp = l1.powf(-self.eps);
        match self.family {
            Family::PowerLaw { delta, .. } => Ok(rho.powf(delta - 2.0) * damp),
            Family::Critical { .. } => Ok(damp / (rho * rho)),
            Family::IteratedLog { depth, .. } => {
                let chain = log_chain(depth, rho);
                let mut g = 1.0 / (rho * rho);
                for lj in &chain {
                    g /= lj * lj;
                }
                Ok(g * damp)
            }
        }
    }

    /// Q(rho) = centrifugal + eval_v + e^(-rho) X(rho); the radial equation
    /// is u'' = (Q + E) u.
    pub fn eval_q(&self, zeta: f64, rho: f64) -> Result<f64> {
        if !(zeta >= 0.0) {
            return Err(Error::InvalidSpec("zeta must be >= 0".into()));
        }
        self.eval_q_ln(if zeta == 0.0 { f64::NEG_INFINITY } else { zeta.ln() }, rho)
    }

    /// Same with zeta supplied as ln(zeta); NEG_INFINITY means zeta = 0.
    pub fn eval_q_ln(&self, zeta_ln: f64, rho: f64) -> Result<f64> {
        let centrifugal = self.centrifugal_ln(zeta_ln, rho);
        Ok(centrifugal + self.eval_v(rho)? + self.x_term(rho))
    }

    pub(crate) fn centrifugal_ln(&self, zeta_ln: f64, rho: f64) -> f64 {
        if zeta_ln == f64::NEG_INFINITY {
            return 0.0;
        }
        let base = crate::transform::exp_clamped(zeta_ln - 2.0 * rho);
        if base == 0.0 {
            return 0.0;
        }
        base * self.q_factor(rho)
    }

    /// q(rho) = 1 + e^(-rho) B(rho); B is only consulted where the factor
    /// can matter at double precision.
    pub(crate) fn q_factor(&self, rho: f64) -> f64 {
        if self.b.is_zero() || rho > 745.0 {
            1.0
        } else {
            1.0 + (-rho).exp() * self.b.eval(rho)
        }
    }

    pub(crate) fn x_term(&self, rho: f64) -> f64 {
        if self.x.is_zero() || rho > 745.0 {
            0.0
        } else {
            (-rho).exp() * self.x.eval(rho)
        }
    }

    /// Magnitude envelope of everything beyond -V0: a V1 plus the sup-bounded
    /// e^(-rho) X term. Monotone decreasing past the domain floor.
    pub(crate) fn remainder_envelope(&self, rho: f64) -> f64 {
        let v1 = if self.a == 0.0 {
            0.0
        } else {
            self.v1_raw(rho).unwrap_or(f64::INFINITY)
        };
        self.a.abs() * v1 + crate::transform::exp_clamped(-rho) * self.x.sup()
    }

    pub(crate) fn v0_envelope(&self, rho: f64) -> f64 {
        self.v0_raw(rho).unwrap_or(f64::INFINITY)
    }
}

fn validate_scalars(a: f64, eps: f64) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::InvalidSpec("a must be finite".into()));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidSpec("eps must be > 0".into()));
    }
    Ok(())
}

/// Certified base point: the smallest rho0 (geometric scan, then bisection to
/// relative 1e-6) past which the family's normalized remainder inequality
/// holds, never below the domain floor. The envelopes are monotone decreasing
/// on the scanned range, so a single evaluation certifies the whole tail.
pub fn auto_rho0(family: Family, a: f64, eps: f64, sup_b: f64, sup_x: f64) -> Result<f64> {
    family.validate()?;
    validate_scalars(a, eps)?;
    let _ = sup_b; // q stays positive for rho >= 1 whenever sup_b < e; checked at use sites
    let floor = domain_floor(family.log_depth());

    let env: Box<dyn Fn(f64) -> f64> = match family {
        Family::PowerLaw { c, delta } if delta > 0.0 => Box::new(move |rho: f64| {
            let rem = (a.abs() * rho.ln().powf(-eps) + rho.powf(2.0 - delta) * (-rho).exp() * sup_x) / c;
            rem + (1.0 - delta * delta / 4.0) * rho.powf(-delta) / (4.0 * c) - 0.5
        }),
        Family::PowerLaw { c, delta } => Box::new(move |rho: f64| {
            // sub-threshold tail: c rho^delta + remainders must sit well under 1/4
            c * rho.powf(delta)
                + a.abs() * rho.powf(delta) * rho.ln().powf(-eps)
                + rho * rho * (-rho).exp() * sup_x
                - 0.125
        }),
        Family::Critical { .. } => Box::new(move |rho: f64| {
            a.abs() * rho.ln().powf(-eps) + rho * rho * (-rho).exp() * sup_x - 0.5
        }),
        Family::IteratedLog { depth, .. } => Box::new(move |rho: f64| {
            let chain = log_chain(depth, rho);
            let mut ginv = rho * rho;
            for lj in &chain {
                ginv *= lj * lj;
            }
            a.abs() * rho.ln().powf(-eps) + ginv * (-rho).exp() * sup_x - 0.5
        }),
    };

    // start past the floor and past where every envelope term is decreasing
    let start = floor.max(4.0_f64.min(floor * 1.0 + 0.0)).max(match family {
        Family::PowerLaw { delta, .. } => (2.0 - delta).max(2.0),
        _ => 2.0,
    });
    let start = start.max(floor);
    if env(start) <= 0.0 {
        return Ok(start);
    }
    let mut lo = start;
    let mut hi = start;
    for _ in 0..200 {
        hi *= 1.5;
        if !hi.is_finite() {
            return Err(Error::BasePoint(
                "remainder condition unsatisfiable within double range".into(),
            ));
        }
        if env(hi) <= 0.0 {
            break;
        }
        lo = hi;
    }
    if env(hi) > 0.0 {
        return Err(Error::BasePoint(
            "remainder condition unsatisfiable with the given sup bounds".into(),
        ));
    }
    for _ in 0..200 {
        if (hi - lo) <= 1e-6 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if env(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone)]
pub struct RadialProblem {
    pub spec: PotentialSpec,
    /// ln(zeta); NEG_INFINITY encodes zeta = 0.
    pub zeta_ln: f64,
    /// Spectral offset E >= 0. E = 0 is admitted only under fixed-window
    /// counting; certified truncation requires E > 0.
    pub e: f64,
    pub bc: Bc,
}

impl RadialProblem {
    pub fn new(spec: PotentialSpec, zeta: f64, e: f64, bc: Bc) -> Result<Self> {
        if !(zeta >= 0.0) || !zeta.is_finite() {
            return Err(Error::InvalidSpec("zeta must be finite and >= 0".into()));
        }
        Self::with_zeta_ln(spec, if zeta == 0.0 { f64::NEG_INFINITY } else { zeta.ln() }, e, bc)
    }

    pub fn with_zeta_ln(spec: PotentialSpec, zeta_ln: f64, e: f64, bc: Bc) -> Result<Self> {
        if !(e >= 0.0) || !e.is_finite() {
            return Err(Error::InvalidSpec("E must be finite and >= 0".into()));
        }
        if zeta_ln.is_nan() || zeta_ln == f64::INFINITY {
            return Err(Error::InvalidSpec("ln zeta must not be NaN or +inf".into()));
        }
        Ok(RadialProblem {
            spec,
            zeta_ln,
            e,
            bc,
        })
    }
}
