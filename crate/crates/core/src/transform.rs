//! Compressed radial coordinates per potential family.
//!
//! Each family has a Liouville substitution t = t(rho), u = omega(rho) w that
//! turns u'' = (Q + E) u into w'' = W(t) w with W order one across the whole
//! oscillation region. Zeros of u and w coincide since omega > 0. The W
//! evaluators are written in the algebraically cancelled form so the leading
//! family terms never meet in floating point, and every remainder term is
//! assembled in log space; radii like e^(e^20) never have to exist as f64.

use crate::potential::{log_chain, Bc, Family, PotentialSpec};

/// Positive clamp for the transformed potential. Clamping is safe for zero
/// counting: a region with W this large admits no angle crossings either way.
pub const W_CLAMP: f64 = 1e9;

pub fn exp_clamped(x: f64) -> f64 {
    if x > 709.0 {
        f64::INFINITY
    } else if x < -745.0 {
        0.0
    } else {
        x.exp()
    }
}

/// Coordinate map for one family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    /// t = (2 sqrt(c)/delta) rho^(delta/2), for the power family with
    /// delta in (0, 2); the transformed equation is w'' = W w with
    /// W = -1 + O(remainders).
    PowerRoot { c: f64, delta: f64 },
    /// t = log rho; the universal fallback (sub-threshold families).
    Log,
    /// t = lambda log rho with lambda = sqrt(c - 1/4).
    ScaledLog { lambda: f64 },
    /// t = lambda log_(depth+1) rho; lambda = sqrt(c_N - 1/4) above the
    /// threshold and 1 below it.
    IterLog { depth: u32, lambda: f64 },
}

/// The coordinate prescribed for a family.
pub fn transform_for(spec: &PotentialSpec) -> Transform {
    match spec.family {
        Family::PowerLaw { c, delta } => {
            if delta > 0.0 {
                Transform::PowerRoot { c, delta }
            } else {
                Transform::Log
            }
        }
        Family::Critical { c } => {
            if c > 0.25 {
                Transform::ScaledLog {
                    lambda: (c - 0.25).sqrt(),
                }
            } else {
                Transform::Log
            }
        }
        Family::IteratedLog { depth, c_n } => Transform::IterLog {
            depth,
            lambda: if c_n > 0.25 { (c_n - 0.25).sqrt() } else { 1.0 },
        },
    }
}

impl Transform {
    pub fn forward(&self, rho: f64) -> f64 {
        match *self {
            Transform::PowerRoot { c, delta } => 2.0 * c.sqrt() / delta * rho.powf(0.5 * delta),
            Transform::Log => rho.ln(),
            Transform::ScaledLog { lambda } => lambda * rho.ln(),
            Transform::IterLog { depth, lambda } => {
                let chain = log_chain(depth + 1, rho);
                lambda * chain[depth as usize]
            }
        }
    }

    /// Inverse map; saturates to +inf where rho leaves double range.
    pub fn inverse(&self, t: f64) -> f64 {
        match *self {
            Transform::PowerRoot { c, delta } => {
                exp_clamped(2.0 / delta * (t * delta / (2.0 * c.sqrt())).ln())
            }
            Transform::Log => exp_clamped(t),
            Transform::ScaledLog { lambda } => exp_clamped(t / lambda),
            Transform::IterLog { depth, lambda } => {
                let mut v = t / lambda;
                for _ in 0..=depth {
                    v = exp_clamped(v);
                }
                v
            }
        }
    }

    pub fn dt_drho(&self, rho: f64) -> f64 {
        match *self {
            Transform::PowerRoot { c, delta } => c.sqrt() * rho.powf(0.5 * delta - 1.0),
            Transform::Log => 1.0 / rho,
            Transform::ScaledLog { lambda } => lambda / rho,
            Transform::IterLog { depth, lambda } => {
                let chain = log_chain(depth, rho);
                let mut denom = rho;
                for l in &chain {
                    denom *= l;
                }
                lambda / denom
            }
        }
    }

    /// Conjugation weight omega with u = omega w; always positive on the domain.
    pub fn weight(&self, rho: f64) -> f64 {
        match *self {
            Transform::PowerRoot { delta, .. } => rho.powf(0.25 * (2.0 - delta)),
            Transform::Log | Transform::ScaledLog { .. } => rho.sqrt(),
            Transform::IterLog { depth, .. } => {
                let chain = log_chain(depth, rho);
                let mut prod = rho;
                for l in &chain {
                    prod *= l;
                }
                prod.sqrt()
            }
        }
    }

    /// omega'/omega.
    pub fn weight_logderiv(&self, rho: f64) -> f64 {
        match *self {
            Transform::PowerRoot { delta, .. } => 0.25 * (2.0 - delta) / rho,
            Transform::Log | Transform::ScaledLog { .. } => 0.5 / rho,
            Transform::IterLog { depth, .. } => {
                let chain = log_chain(depth, rho);
                let mut sum = 1.0;
                let mut prod = 1.0;
                for l in &chain {
                    prod *= l;
                    sum += 1.0 / prod;
                }
                0.5 * sum / rho
            }
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            Transform::PowerRoot { .. } | Transform::Log => 1.0,
            Transform::ScaledLog { lambda } | Transform::IterLog { lambda, .. } => lambda,
        }
    }
}

/// How the mode term e^(-2 rho) q(rho) zeta enters the effective potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CentrifugalMode {
    /// Evaluate it honestly.
    Full,
    /// Omit it (never decreases the zero count, by Sturm comparison).
    Dropped,
    /// Replace it by a constant ceiling, ln of the value (never increases
    /// the count). Agreement of Dropped and Ceiling pins the true count.
    Ceiling { ln_value: f64 },
}

/// Effective potential evaluator for one problem in one coordinate.
#[derive(Clone)]
pub struct WEval<'a> {
    pub spec: &'a PotentialSpec,
    pub transform: Transform,
    pub zeta_ln: f64,
    pub e: f64,
    pub mode: CentrifugalMode,
}

impl<'a> WEval<'a> {
    pub fn new(
        spec: &'a PotentialSpec,
        transform: Transform,
        zeta_ln: f64,
        e: f64,
        mode: CentrifugalMode,
    ) -> Self {
        WEval {
            spec,
            transform,
            zeta_ln,
            e,
            mode,
        }
    }

    /// W(t) in the transformed equation w'' = W w.
    pub fn w(&self, t: f64) -> f64 {
        let w = match self.transform {
            Transform::PowerRoot { c, delta } => self.w_power(t, c, delta),
            Transform::Log => self.w_log(t, 1.0),
            Transform::ScaledLog { lambda } => self.w_log(t, lambda),
            Transform::IterLog { depth, lambda } => self.w_iterlog(t, depth, lambda),
        };
        w.min(W_CLAMP)
    }

    /// Centrifugal term already multiplied by exp(ln_jac) = (d rho/d t)^2,
    /// assembled in log space.
    fn centrifugal(&self, rho: f64, ln_rho: f64, ln_jac: f64) -> f64 {
        match self.mode {
            CentrifugalMode::Dropped => 0.0,
            CentrifugalMode::Full => {
                if self.zeta_ln == f64::NEG_INFINITY {
                    0.0
                } else {
                    let base = exp_clamped(self.zeta_ln - 2.0 * rho + ln_jac);
                    if base == 0.0 {
                        0.0
                    } else {
                        base * self.spec.q_factor(rho)
                    }
                }
            }
            CentrifugalMode::Ceiling { ln_value } => exp_clamped(ln_value + ln_jac),
        }
    }

    fn x_scaled(&self, rho: f64, ln_jac: f64) -> f64 {
        if self.spec.x.is_zero() {
            return 0.0;
        }
        let factor = exp_clamped(ln_jac - rho);
        if factor == 0.0 {
            0.0
        } else {
            factor * self.spec.x.eval(rho)
        }
    }

    fn w_power(&self, t: f64, c: f64, delta: f64) -> f64 {
        let ln_rho = 2.0 / delta * (t * delta / (2.0 * c.sqrt())).ln();
        let rho = exp_clamped(ln_rho);
        let ln_jac = (2.0 - delta) * ln_rho - c.ln(); // rho^(2-delta)/c
        let shift = 0.25 / c * (1.0 - 0.25 * delta * delta) * exp_clamped(-delta * ln_rho);
        let damped = if self.spec.a == 0.0 {
            0.0
        } else {
            self.spec.a / c * exp_clamped(-self.spec.eps * ln_rho.ln())
        };
        -1.0 + shift
            + damped
            + exp_clamped(ln_jac + self.e.ln())
            + self.x_scaled(rho, ln_jac)
            + self.centrifugal(rho, ln_rho, ln_jac)
    }

    /// Log coordinate, any family: W = (1/4 + rho^2 (Q + E)) / lambda^2 with
    /// the family's leading terms folded in exactly.
    fn w_log(&self, t: f64, lambda: f64) -> f64 {
        let ln_rho = t / lambda;
        let rho = exp_clamped(ln_rho);
        let ln_jac = 2.0 * ln_rho;
        let lead = match self.spec.family {
            // 1/4 - c rho^delta
            Family::PowerLaw { c, delta } => 0.25 - c * exp_clamped(delta * ln_rho),
            Family::Critical { c } => 0.25 - c,
            Family::IteratedLog { depth, c_n } => {
                // 1/4 - rho^2 V0 telescopes into pure log products
                let chain = log_chain(depth, rho);
                let mut prod = 1.0;
                let mut acc = 0.0;
                for (j, l) in chain.iter().enumerate() {
                    prod *= l * l;
                    let coef = if j + 1 == depth as usize { c_n } else { 0.25 };
                    acc += coef / prod;
                }
                -acc
            }
        };
        let damped = if self.spec.a == 0.0 {
            0.0
        } else {
            let v1_jac = match self.spec.family {
                Family::PowerLaw { delta, .. } => exp_clamped(delta * ln_rho),
                Family::Critical { .. } => 1.0,
                Family::IteratedLog { depth, .. } => {
                    let chain = log_chain(depth, rho);
                    let mut prod = 1.0;
                    for l in &chain {
                        prod *= l * l;
                    }
                    1.0 / prod
                }
            };
            self.spec.a * v1_jac * exp_clamped(-self.spec.eps * ln_rho.ln())
        };
        (lead + damped
            + exp_clamped(ln_jac + self.e.ln())
            + self.x_scaled(rho, ln_jac)
            + self.centrifugal(rho, ln_rho, ln_jac))
            / (lambda * lambda)
    }

    fn w_iterlog(&self, t: f64, depth: u32, lambda: f64) -> f64 {
        let c_n = match self.spec.family {
            Family::IteratedLog { c_n, .. } => c_n,
            _ => unreachable!("iter-log coordinate only pairs with the iterated family"),
        };
        // eta = log_(depth+1) rho; walk the chain back down:
        // levels[j] = log_(j) rho for j = depth+1, depth, ..., 1
        let eta = t / lambda;
        let mut levels = vec![eta];
        for _ in 0..depth {
            levels.push(exp_clamped(*levels.last().expect("nonempty")));
        }
        levels.reverse(); // now levels[0] = log rho, ..., levels[depth] = eta
        let ln_rho = levels[0];
        let rho = exp_clamped(ln_rho);
        // ln of G_depth^{-1} = rho^2 prod (log_(j) rho)^2; ln(levels[j-1]) is
        // levels[j], so the sum over levels[1..=depth] is exactly the ln chain
        let mut ln_ginv = 2.0 * ln_rho;
        for l in levels.iter().skip(1) {
            ln_ginv += 2.0 * l;
        }
        let damped = if self.spec.a == 0.0 {
            0.0
        } else {
            // G^{-1} a V1 = a (log rho)^(-eps), and ln(log rho) = levels[1]
            self.spec.a * exp_clamped(-self.spec.eps * levels[1])
        };
        ((0.25 - c_n)
            + damped
            + exp_clamped(ln_ginv + self.e.ln())
            + self.x_scaled(rho, ln_ginv)
            + self.centrifugal(rho, ln_rho, ln_ginv))
            / (lambda * lambda)
    }
}

/// Raw-coordinate effective potential Q(rho) + E with the same centrifugal
/// switching; phase one of the two-phase engine integrates against this.
pub struct RawEval<'a> {
    pub spec: &'a PotentialSpec,
    pub zeta_ln: f64,
    pub e: f64,
    pub mode: CentrifugalMode,
}

impl<'a> RawEval<'a> {
    pub fn w(&self, rho: f64) -> f64 {
        let centr = match self.mode {
            CentrifugalMode::Dropped => 0.0,
            CentrifugalMode::Full => self.spec.centrifugal_ln(self.zeta_ln, rho),
            CentrifugalMode::Ceiling { ln_value } => exp_clamped(ln_value),
        };
        let v = self.spec.eval_v(rho).expect("raw window inside the domain");
        (centr + v + self.spec.x_term(rho) + self.e).min(W_CLAMP)
    }
}

/// Prufer angle of the initial condition in the given coordinate at rho.
/// Dirichlet data (u, u') = (0, 1) is an angle of 0 in any coordinate;
/// Neumann data (1, 0) picks up the conjugation weight.
pub fn initial_theta(bc: Bc, transform: Option<&Transform>, rho: f64) -> f64 {
    match bc {
        Bc::Dirichlet => 0.0,
        Bc::Neumann => match transform {
            None => std::f64::consts::FRAC_PI_2,
            Some(tr) => {
                let wl = tr.weight_logderiv(rho);
                let tp = tr.dt_drho(rho);
                let theta = f64::atan2(1.0, -wl / tp);
                debug_assert!(theta > 0.0 && theta < std::f64::consts::PI);
                theta
            }
        },
    }
}

/// Transplant a raw-coordinate direction angle (mod pi) into the transformed
/// coordinate at the same radius. Returns an angle in [0, pi).
pub fn transplant_angle(theta_raw: f64, transform: &Transform, rho: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let alpha = theta_raw.rem_euclid(pi);
    let (s, c) = alpha.sin_cos();
    let wl = transform.weight_logderiv(rho);
    let tp = transform.dt_drho(rho);
    let theta = f64::atan2(s, (c - s * wl) / tp);
    theta.rem_euclid(pi)
}
