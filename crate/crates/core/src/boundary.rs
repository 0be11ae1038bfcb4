//! Boundary Laplacian spectra: exact level/multiplicity enumeration for the
//! built-in manifolds and Weyl-law estimates used to seed searches.

use crate::count::{big_log10, f64_floor_to_biguint, Count, LogScale};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_integer::Roots;
use num_traits::{One, ToPrimitive, Zero};

/// Largest bound (as ln) for which the exact integer path is attempted.
/// Beyond it the count is produced directly in log10 form.
const EXACT_LN_LIMIT: f64 = 700.0;

/// Hard cap on enumerated levels; callers needing more must go through the
/// cumulative closed forms.
const ENUMERATION_CAP: u64 = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKind {
    /// Round sphere S^n, eigenvalues k(k+n-1).
    Sphere { dim: u32 },
    /// Flat torus with the given side lengths, eigenvalues 4 pi^2 sum (k_i/L_i)^2.
    FlatTorus { lengths: Vec<f64> },
    /// User-supplied (eigenvalue, multiplicity) pairs, strictly ascending.
    Explicit { levels: Vec<(f64, u64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpectrum {
    kind: BoundaryKind,
}

/// Eigenvalue and multiplicity of the k-th sphere level.
pub fn sphere_mode(n: u32, k: u64) -> (f64, BigUint) {
    let zeta = k as f64 * (k as f64 + n as f64 - 1.0);
    (zeta, sphere_multiplicity(n, &BigUint::from(k)))
}

fn binom(n: &BigUint, r: u32) -> BigUint {
    // n choose r for small r: product form with exact stepwise division
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r as u64 {
        let term = if n >= &BigUint::from(i) {
            n - BigUint::from(i)
        } else {
            return BigUint::zero();
        };
        num *= term;
        den *= BigUint::from(i + 1);
    }
    num / den
}

fn sphere_multiplicity(n: u32, k: &BigUint) -> BigUint {
    // dim of degree-k spherical harmonics on S^n: C(n+k, n) - C(n+k-2, n)
    let first = binom(&(k + BigUint::from(n)), n);
    if k < &BigUint::from(2u32) {
        first
    } else {
        first - binom(&(k - 2u32 + BigUint::from(n)), n)
    }
}

/// Cumulative sphere count up to level K: C(n+K, n) + C(n+K-1, n).
fn sphere_cumulative_at_level(n: u32, k: &BigUint) -> BigUint {
    let first = binom(&(k + BigUint::from(n)), n);
    if k.is_zero() {
        first
    } else {
        first + binom(&(k - 1u32 + BigUint::from(n)), n)
    }
}

/// Largest level index with eigenvalue <= bound, exact integer arithmetic.
fn sphere_level_floor(n: u32, bound: &BigUint) -> BigUint {
    // k(k+n-1) <= B  =>  k = floor((1-n + sqrt((n-1)^2 + 4B)) / 2)
    let nm1 = BigUint::from(n - 1);
    let disc = &nm1 * &nm1 + BigUint::from(4u32) * bound;
    let mut k = (disc.sqrt() - &nm1) / BigUint::from(2u32);
    // guard against sqrt truncation on either side
    loop {
        let trial = &k + BigUint::one();
        if &trial * (&trial + &nm1) <= *bound {
            k = trial;
        } else {
            break;
        }
    }
    while &k * (&k + &nm1) > *bound && !k.is_zero() {
        k -= BigUint::one();
    }
    k
}

impl BoundarySpectrum {
    pub fn sphere(dim: u32) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidSpec("sphere dimension must be >= 1".into()));
        }
        Ok(BoundarySpectrum {
            kind: BoundaryKind::Sphere { dim },
        })
    }

    pub fn flat_torus(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() || lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidSpec(
                "torus side lengths must be positive and finite".into(),
            ));
        }
        Ok(BoundarySpectrum {
            kind: BoundaryKind::FlatTorus { lengths },
        })
    }

    pub fn explicit(levels: Vec<(f64, u64)>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSpec("explicit spectrum is empty".into()));
        }
        for w in levels.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(Error::InvalidSpec(
                    "explicit eigenvalues must be strictly ascending".into(),
                ));
            }
        }
        if levels[0].0 < 0.0 || levels.iter().any(|&(_, m)| m == 0) {
            return Err(Error::InvalidSpec(
                "explicit levels need zeta >= 0 and multiplicity >= 1".into(),
            ));
        }
        Ok(BoundarySpectrum {
            kind: BoundaryKind::Explicit { levels },
        })
    }

    pub fn kind(&self) -> &BoundaryKind {
        &self.kind
    }

    /// Boundary dimension n.
    pub fn dim(&self) -> u32 {
        match &self.kind {
            BoundaryKind::Sphere { dim } => *dim,
            BoundaryKind::FlatTorus { lengths } => lengths.len() as u32,
            // dimension is not recoverable from a raw list; callers that need
            // Weyl scaling should prefer built-ins
            BoundaryKind::Explicit { .. } => 1,
        }
    }

    /// Number of eigenvalues (with multiplicity) at most `bound`.
    pub fn cumulative_multiplicity(&self, bound: LogScale) -> Result<Count> {
        if bound.ln == f64::NEG_INFINITY {
            // only the constant mode sits at zero for connected built-ins
            return self.cumulative_small(0.0);
        }
        if bound.ln <= EXACT_LN_LIMIT {
            self.cumulative_small(bound.value())
        } else {
            self.cumulative_log10(bound)
        }
    }

    fn cumulative_small(&self, bound: f64) -> Result<Count> {
        match &self.kind {
            BoundaryKind::Sphere { dim } => {
                let b = f64_floor_to_biguint(bound)
                    .ok_or_else(|| Error::InvalidSpec("bound must be finite".into()))?;
                let k = sphere_level_floor(*dim, &b);
                Ok(Count::Exact(sphere_cumulative_at_level(*dim, &k)))
            }
            BoundaryKind::FlatTorus { lengths } => {
                Ok(Count::Exact(torus_lattice_count(lengths, bound)?))
            }
            BoundaryKind::Explicit { levels } => {
                let last = levels.last().expect("validated nonempty").0;
                if bound > last {
                    return Err(Error::SpectrumExhausted { last });
                }
                let total: u64 = levels
                    .iter()
                    .take_while(|&&(z, _)| z <= bound)
                    .map(|&(_, m)| m)
                    .sum();
                Ok(Count::Exact(BigUint::from(total)))
            }
        }
    }

    fn cumulative_log10(&self, bound: LogScale) -> Result<Count> {
        let ln10 = std::f64::consts::LN_10;
        match &self.kind {
            BoundaryKind::Sphere { dim } => {
                let n = *dim as f64;
                // k ~ (sqrt((n-1)^2 + 4B) - (n-1)) / 2; B dominates everything
                let ln_k = 0.5 * (bound.ln + (4.0f64).ln()) - (2.0f64).ln();
                // cumulative = C(n+K, n) + C(n+K-1, n) ~ 2 K^n / n!
                let ln_count = (2.0f64).ln() - ln_factorial(*dim) + n * ln_k;
                Ok(Count::Log10(ln_count / ln10))
            }
            BoundaryKind::FlatTorus { lengths } => {
                let n = lengths.len() as f64;
                let ln_c = weyl_constant_ln(&self.kind);
                Ok(Count::Log10((ln_c + 0.5 * n * bound.ln) / ln10))
            }
            BoundaryKind::Explicit { levels } => Err(Error::SpectrumExhausted {
                last: levels.last().expect("validated nonempty").0,
            }),
        }
    }

    /// Weyl leading term C * B^(n/2) in the eigenvalue variable. A seeding
    /// heuristic for searches, never ground truth.
    pub fn weyl_estimate(&self, bound: f64) -> f64 {
        let n = self.dim() as f64;
        (weyl_constant_ln(&self.kind) + 0.5 * n * bound.ln()).exp()
    }

    /// Ascending (eigenvalue, multiplicity) levels with eigenvalue <= bound.
    pub fn levels_up_to(&self, bound: f64) -> Result<Vec<(f64, BigUint)>> {
        match &self.kind {
            BoundaryKind::Sphere { dim } => {
                let est = self.weyl_estimate(bound.max(1.0));
                if est > ENUMERATION_CAP as f64 {
                    return Err(Error::CutoffTooLarge {
                        required: est as u64,
                        cutoff: ENUMERATION_CAP,
                    });
                }
                let mut out = Vec::new();
                let mut k = 0u64;
                loop {
                    let (z, m) = sphere_mode(*dim, k);
                    if z > bound {
                        break;
                    }
                    out.push((z, m));
                    k += 1;
                }
                Ok(out)
            }
            BoundaryKind::FlatTorus { lengths } => torus_levels(lengths, bound),
            BoundaryKind::Explicit { levels } => {
                let last = levels.last().expect("validated nonempty").0;
                if bound > last {
                    return Err(Error::SpectrumExhausted { last });
                }
                Ok(levels
                    .iter()
                    .take_while(|&&(z, _)| z <= bound)
                    .map(|&(z, m)| (z, BigUint::from(m)))
                    .collect())
            }
        }
    }
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n as u64).map(|i| (i as f64).ln()).sum()
}

/// ln of the Weyl constant: vol(unit n-ball) * vol(M) / (2 pi)^n.
fn weyl_constant_ln(kind: &BoundaryKind) -> f64 {
    let pi = std::f64::consts::PI;
    match kind {
        BoundaryKind::Sphere { dim } => {
            let n = *dim as f64;
            // omega_n = pi^(n/2) / Gamma(n/2 + 1), vol(S^n) = 2 pi^((n+1)/2) / Gamma((n+1)/2)
            let ln_omega = 0.5 * n * pi.ln() - ln_gamma(0.5 * n + 1.0);
            let ln_vol = (2.0f64).ln() + 0.5 * (n + 1.0) * pi.ln() - ln_gamma(0.5 * (n + 1.0));
            ln_omega + ln_vol - n * (2.0 * pi).ln()
        }
        BoundaryKind::FlatTorus { lengths } => {
            let n = lengths.len() as f64;
            let ln_omega = 0.5 * n * pi.ln() - ln_gamma(0.5 * n + 1.0);
            let ln_vol: f64 = lengths.iter().map(|l| l.ln()).sum();
            ln_omega + ln_vol - n * (2.0 * pi).ln()
        }
        BoundaryKind::Explicit { levels } => {
            // calibrate against the list tail; purely a heuristic
            let (z_last, _) = *levels.last().expect("validated nonempty");
            let total: u64 = levels.iter().map(|&(_, m)| m).sum();
            if z_last > 0.0 {
                (total as f64).ln() - 0.5 * z_last.ln()
            } else {
                0.0
            }
        }
    }
}

/// Lanczos approximation, good to ~1e-13 for the small arguments used here.
pub(crate) fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return pi.ln() - (pi * x).sin().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

fn torus_levels(lengths: &[f64], bound: f64) -> Result<Vec<(f64, BigUint)>> {
    let mut raw: Vec<f64> = Vec::new();
    torus_enumerate(lengths, bound, &mut raw)?;
    raw.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    // merge levels that coincide up to rounding
    let mut out: Vec<(f64, BigUint)> = Vec::new();
    for z in raw {
        match out.last_mut() {
            Some((z0, m)) if (z - *z0).abs() <= 1e-9 * z0.max(1.0) => *m += BigUint::one(),
            _ => out.push((z, BigUint::one())),
        }
    }
    Ok(out)
}

fn torus_enumerate(lengths: &[f64], bound: f64, out: &mut Vec<f64>) -> Result<()> {
    let n = lengths.len();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut k = vec![0i64; n];
    let ranges: Vec<i64> = lengths
        .iter()
        .map(|l| (l * bound.max(0.0).sqrt() / two_pi).ceil() as i64)
        .collect();
    let total_est: f64 = ranges.iter().map(|&r| (2 * r + 1) as f64).product();
    if total_est > ENUMERATION_CAP as f64 {
        return Err(Error::CutoffTooLarge {
            required: total_est as u64,
            cutoff: ENUMERATION_CAP,
        });
    }
    fn rec(
        lengths: &[f64],
        ranges: &[i64],
        bound: f64,
        dim: usize,
        k: &mut Vec<i64>,
        out: &mut Vec<f64>,
    ) {
        if dim == lengths.len() {
            let two_pi = 2.0 * std::f64::consts::PI;
            let z: f64 = k
                .iter()
                .zip(lengths)
                .map(|(&ki, &l)| (two_pi * ki as f64 / l).powi(2))
                .sum();
            if z <= bound {
                out.push(z);
            }
            return;
        }
        for v in -ranges[dim]..=ranges[dim] {
            k[dim] = v;
            rec(lengths, ranges, bound, dim + 1, k, out);
        }
    }
    rec(lengths, &ranges, bound, 0, &mut k, out);
    Ok(())
}

fn torus_lattice_count(lengths: &[f64], bound: f64) -> Result<BigUint> {
    let mut raw = Vec::new();
    torus_enumerate(lengths, bound, &mut raw)?;
    Ok(BigUint::from(raw.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_modes_match_closed_forms() {
        // circle: k^2 with multiplicity 2
        let (z, m) = sphere_mode(1, 3);
        assert_eq!(z, 9.0);
        assert_eq!(m, BigUint::from(2u32));
        // two-sphere: k(k+1), 2k+1
        let (z, m) = sphere_mode(2, 3);
        assert_eq!(z, 12.0);
        assert_eq!(m, BigUint::from(7u32));
    }

    /// Brute-force dimension of degree-k harmonic homogeneous polynomials in
    /// d variables: rank-nullity of the Laplacian on the monomial basis.
    fn harmonic_dim_brute(d: usize, k: u32) -> usize {
        fn monomials(d: usize, k: u32) -> Vec<Vec<u32>> {
            if d == 1 {
                return vec![vec![k]];
            }
            let mut out = Vec::new();
            for first in 0..=k {
                for mut rest in monomials(d - 1, k - first) {
                    let mut m = vec![first];
                    m.append(&mut rest);
                    out.push(m);
                }
            }
            out
        }
        let dom = monomials(d, k);
        if k < 2 {
            return dom.len();
        }
        let img = monomials(d, k - 2);
        let idx = |m: &Vec<u32>| img.iter().position(|x| x == m).expect("image basis");
        // matrix of the Laplacian, image-basis rows by domain-basis columns
        let mut mat = vec![vec![0.0f64; dom.len()]; img.len()];
        for (col, mono) in dom.iter().enumerate() {
            for i in 0..d {
                if mono[i] >= 2 {
                    let mut target = mono.clone();
                    target[i] -= 2;
                    let coef = (mono[i] * (mono[i] - 1)) as f64;
                    mat[idx(&target)][col] += coef;
                }
            }
        }
        // Gaussian elimination rank
        let rows = mat.len();
        let cols = dom.len();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let mut pivot = None;
            for r in row..rows {
                if mat[r][col].abs() > 1e-9 {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            mat.swap(row, p);
            let pv = mat[row][col];
            for r in 0..rows {
                if r != row && mat[r][col].abs() > 0.0 {
                    let f = mat[r][col] / pv;
                    for c in col..cols {
                        mat[r][c] -= f * mat[row][c];
                    }
                }
            }
            rank += 1;
            row += 1;
            if row == rows {
                break;
            }
        }
        dom.len() - rank
    }

    #[test]
    fn sphere_multiplicity_against_brute_force_harmonics() {
        // S^3 level 2: degree-2 harmonics in 4 variables
        let expected = harmonic_dim_brute(4, 2);
        let (z, m) = sphere_mode(3, 2);
        assert_eq!(z, 8.0);
        assert_eq!(m, BigUint::from(expected));
        assert_eq!(expected, 9);
        // a few more levels for good measure
        for k in 0..4u32 {
            let (_, m) = sphere_mode(3, k as u64);
            assert_eq!(m, BigUint::from(harmonic_dim_brute(4, k)));
        }
    }

    #[test]
    fn cumulative_small_bounds() {
        let s1 = BoundarySpectrum::sphere(1).unwrap();
        let c = s1
            .cumulative_multiplicity(LogScale::from_value(10.0))
            .unwrap();
        assert_eq!(format!("{c}"), "7");
        let s2 = BoundarySpectrum::sphere(2).unwrap();
        let c = s2
            .cumulative_multiplicity(LogScale::from_value(6.0))
            .unwrap();
        assert_eq!(format!("{c}"), "9");
    }

    #[test]
    fn cumulative_huge_bound_via_integer_sqrt() {
        let s1 = BoundarySpectrum::sphere(1).unwrap();
        let b = (40.0f64).exp();
        let c = s1.cumulative_multiplicity(LogScale::from_value(b)).unwrap();
        // independent route: arbitrary-precision integer square root
        let k = f64_floor_to_biguint(b).unwrap().sqrt();
        let expected = BigUint::from(2u32) * &k + BigUint::one();
        match &c {
            Count::Exact(v) => assert_eq!(v, &expected),
            _ => panic!("bound within exact range"),
        }
        let anchor = (2.0 * (20.0f64).exp() + 1.0).log10();
        assert!((c.log10() - anchor).abs() < 1e-7);
    }

    #[test]
    fn weyl_estimates() {
        let s1 = BoundarySpectrum::sphere(1).unwrap();
        assert!((s1.weyl_estimate(10_000.0) - 200.0).abs() < 1e-9);
        assert!((s1.weyl_estimate(4.0) - 4.0).abs() < 1e-9);
        let s2 = BoundarySpectrum::sphere(2).unwrap();
        // enumeration oracle: levels k <= 10 sum to 121, Weyl predicts ~B
        let exact: u64 = (0..=10u64)
            .map(|k| sphere_mode(2, k).1.to_u64().unwrap())
            .sum();
        assert_eq!(exact, 121);
        assert!((s2.weyl_estimate(110.0) - 110.0).abs() < 1e-9);
    }

    #[test]
    fn cumulative_monotone_and_weyl_ratio_settles() {
        for n in 1..=3u32 {
            let s = BoundarySpectrum::sphere(n).unwrap();
            let mut prev = Count::zero();
            let mut ratios = Vec::new();
            for exp in 3..=9 {
                let b = 10f64.powi(exp);
                let c = s.cumulative_multiplicity(LogScale::from_value(b)).unwrap();
                assert!(c.cmp_log(&prev) != std::cmp::Ordering::Less);
                ratios.push(c.approx() / b.powf(n as f64 / 2.0));
                prev = c;
            }
            let last = ratios[ratios.len() - 1];
            let second_last = ratios[ratios.len() - 2];
            assert!(
                (last / second_last - 1.0).abs() < 0.05,
                "ratio drift {last} vs {second_last} for n = {n}"
            );
        }
    }

    #[test]
    fn exact_and_log_paths_agree_on_overlap() {
        let s2 = BoundarySpectrum::sphere(2).unwrap();
        for exp in [6i32, 9, 12, 15] {
            let b = 10f64.powi(exp);
            let exact = s2
                .cumulative_multiplicity(LogScale::from_value(b))
                .unwrap()
                .log10();
            let ln10 = std::f64::consts::LN_10;
            let ln_k = 0.5 * ((b * 4.0).ln()) - (2.0f64).ln();
            let approx = ((2.0f64).ln() - (2.0f64).ln() + 2.0 * ln_k) / ln10;
            // K^2 vs exact (K+1)^2-ish varies at O(1/K); 12 digits only in the log
            assert!(
                (exact - approx).abs() / exact.abs() < 1e-2,
                "leading order sanity"
            );
        }
        // the stricter 12-digit statement on the circle, where the count has a closed form
        let s1 = BoundarySpectrum::sphere(1).unwrap();
        for exp in [6i32, 9, 12, 15] {
            let b = 10f64.powi(exp);
            let exact = s1
                .cumulative_multiplicity(LogScale::from_value(b))
                .unwrap()
                .log10();
            let closed = (2.0 * b.sqrt().floor() + 1.0).log10();
            assert!((exact - closed).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_counts_and_explicit_errors() {
        let t = BoundarySpectrum::flat_torus(vec![2.0 * std::f64::consts::PI; 2]).unwrap();
        // eigenvalues k1^2 + k2^2 on the unit-frequency torus; count within 13
        let c = t
            .cumulative_multiplicity(LogScale::from_value(25.0))
            .unwrap();
        let exact: u64 = {
            let mut n = 0u64;
            for k1 in -5i64..=5 {
                for k2 in -5i64..=5 {
                    if k1 * k1 + k2 * k2 <= 25 {
                        n += 1;
                    }
                }
            }
            n
        };
        assert_eq!(format!("{c}"), format!("{exact}"));

        let e = BoundarySpectrum::explicit(vec![(0.0, 1), (2.0, 3)]).unwrap();
        assert_eq!(
            format!(
                "{}",
                e.cumulative_multiplicity(LogScale::from_value(2.0)).unwrap()
            ),
            "4"
        );
        assert!(matches!(
            e.cumulative_multiplicity(LogScale::from_value(5.0)),
            Err(Error::SpectrumExhausted { .. })
        ));
    }
}
