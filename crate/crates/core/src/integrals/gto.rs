//! Integrals over Cartesian Gaussian primitives, McMurchie–Davidson scheme.
//!
//! All quantities are in the reduced units of the calling code (lengths in
//! effective Bohr radii, energies in effective Hartrees). Only the angular
//! momenta needed here (s and p, so l ≤ 1 per centre) are exercised, but the
//! recursions are general.

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive {
    pub exponent: f64,
    pub coefficient: f64,
    pub center: [f64; 3],
    pub powers: [u32; 3],
}

/// Contracted function: a fixed linear combination of primitives.
pub type Contracted = [Primitive];

/// Boys function F_n(T) for n = 0..=n_max.
pub fn boys(n_max: usize, t: f64) -> Vec<f64> {
    let mut f = vec![0.0; n_max + 1];
    if t < 1e-13 {
        for (n, v) in f.iter_mut().enumerate() {
            *v = 1.0 / (2 * n + 1) as f64;
        }
        return f;
    }
    if t > 35.0 {
        // erf(√T) = 1 to machine precision; upward recursion is stable here
        f[0] = 0.5 * (PI / t).sqrt();
        let e = (-t).exp();
        for n in 1..=n_max {
            f[n] = ((2 * n - 1) as f64 * f[n - 1] - e) / (2.0 * t);
        }
        return f;
    }
    // series for the top order, then stable downward recursion
    let e = (-t).exp();
    let mut term = 1.0 / (2 * n_max + 1) as f64;
    let mut sum = term;
    let mut k = 1;
    while term > 1e-17 * sum {
        term *= 2.0 * t / (2 * n_max + 2 * k + 1) as f64;
        sum += term;
        k += 1;
    }
    f[n_max] = e * sum;
    for n in (0..n_max).rev() {
        f[n] = (2.0 * t * f[n + 1] + e) / (2 * n + 1) as f64;
    }
    f
}

/// Hermite expansion coefficient E^{ij}_t for one Cartesian direction.
/// `qx` is A_x − B_x.
fn hermite_e(i: i32, j: i32, t: i32, qx: f64, a: f64, b: f64) -> f64 {
    let p = a + b;
    let q = a * b / p;
    if t < 0 || t > i + j {
        0.0
    } else if i == 0 && j == 0 && t == 0 {
        (-q * qx * qx).exp()
    } else if j == 0 {
        hermite_e(i - 1, j, t - 1, qx, a, b) / (2.0 * p)
            - (q * qx / a) * hermite_e(i - 1, j, t, qx, a, b)
            + (t + 1) as f64 * hermite_e(i - 1, j, t + 1, qx, a, b)
    } else {
        hermite_e(i, j - 1, t - 1, qx, a, b) / (2.0 * p)
            + (q * qx / b) * hermite_e(i, j - 1, t, qx, a, b)
            + (t + 1) as f64 * hermite_e(i, j - 1, t + 1, qx, a, b)
    }
}

/// Hermite Coulomb integral R^n_{tuv}; `f` holds pre-scaled Boys values
/// (−2p)^n F_n(p|PC|²).
fn hermite_r(t: i32, u: i32, v: i32, n: usize, pc: [f64; 3], f: &[f64]) -> f64 {
    if t < 0 || u < 0 || v < 0 {
        return 0.0;
    }
    if t == 0 && u == 0 && v == 0 {
        return f[n];
    }
    if t > 0 {
        (t - 1) as f64 * hermite_r(t - 2, u, v, n + 1, pc, f)
            + pc[0] * hermite_r(t - 1, u, v, n + 1, pc, f)
    } else if u > 0 {
        (u - 1) as f64 * hermite_r(t, u - 2, v, n + 1, pc, f)
            + pc[1] * hermite_r(t, u - 1, v, n + 1, pc, f)
    } else {
        (v - 1) as f64 * hermite_r(t, u, v - 2, n + 1, pc, f)
            + pc[2] * hermite_r(t, u, v - 1, n + 1, pc, f)
    }
}

fn scaled_boys(n_max: usize, p: f64, pc: [f64; 3]) -> Vec<f64> {
    let t = p * (pc[0] * pc[0] + pc[1] * pc[1] + pc[2] * pc[2]);
    let mut f = boys(n_max, t);
    let mut scale = 1.0;
    for v in f.iter_mut() {
        *v *= scale;
        scale *= -2.0 * p;
    }
    f
}

fn product_center(a: &Primitive, b: &Primitive) -> [f64; 3] {
    let p = a.exponent + b.exponent;
    let mut c = [0.0; 3];
    for k in 0..3 {
        c[k] = (a.exponent * a.center[k] + b.exponent * b.center[k]) / p;
    }
    c
}

fn overlap_1d(i: u32, j: u32, qx: f64, a: f64, b: f64) -> f64 {
    hermite_e(i as i32, j as i32, 0, qx, a, b)
}

fn prim_overlap_powers(a: &Primitive, pa: [u32; 3], b: &Primitive, pb: [u32; 3]) -> f64 {
    let p = a.exponent + b.exponent;
    let mut s = (PI / p).powf(1.5);
    for k in 0..3 {
        s *= overlap_1d(pa[k], pb[k], a.center[k] - b.center[k], a.exponent, b.exponent);
    }
    s
}

pub fn prim_overlap(a: &Primitive, b: &Primitive) -> f64 {
    prim_overlap_powers(a, a.powers, b, b.powers)
}

/// ⟨a| −½∇² |b⟩.
pub fn prim_kinetic(a: &Primitive, b: &Primitive) -> f64 {
    let beta = b.exponent;
    let l = b.powers;
    let lsum = (l[0] + l[1] + l[2]) as f64;
    let mut term0 = beta * (2.0 * lsum + 3.0) * prim_overlap(a, b);
    let mut term1 = 0.0;
    let mut term2 = 0.0;
    for k in 0..3 {
        let mut up = l;
        up[k] += 2;
        term1 += prim_overlap_powers(a, a.powers, b, up);
        if l[k] >= 2 {
            let mut down = l;
            down[k] -= 2;
            term2 += (l[k] * (l[k] - 1)) as f64 * prim_overlap_powers(a, a.powers, b, down);
        }
    }
    term0 -= 2.0 * beta * beta * term1;
    term0 - 0.5 * term2
}

/// ⟨a| 1/|r − C| |b⟩ (attractive sign not applied).
pub fn prim_coulomb_1e(a: &Primitive, b: &Primitive, c: [f64; 3]) -> f64 {
    let p = a.exponent + b.exponent;
    let pp = product_center(a, b);
    let pc = [pp[0] - c[0], pp[1] - c[1], pp[2] - c[2]];
    let (la, lb) = (a.powers, b.powers);
    let n_max = (0..3).map(|k| (la[k] + lb[k]) as usize).sum();
    let f = scaled_boys(n_max, p, pc);
    let q = [
        a.center[0] - b.center[0],
        a.center[1] - b.center[1],
        a.center[2] - b.center[2],
    ];
    let mut v = 0.0;
    for t in 0..=(la[0] + lb[0]) as i32 {
        let ex = hermite_e(la[0] as i32, lb[0] as i32, t, q[0], a.exponent, b.exponent);
        for u in 0..=(la[1] + lb[1]) as i32 {
            let ey = hermite_e(la[1] as i32, lb[1] as i32, u, q[1], a.exponent, b.exponent);
            for w in 0..=(la[2] + lb[2]) as i32 {
                let ez = hermite_e(la[2] as i32, lb[2] as i32, w, q[2], a.exponent, b.exponent);
                v += ex * ey * ez * hermite_r(t, u, w, 0, pc, &f);
            }
        }
    }
    2.0 * PI / p * v
}

struct HermitePair {
    p: f64,
    center: [f64; 3],
    /// (t, u, v, coefficient) with E^x_t E^y_u E^z_v already multiplied.
    terms: Vec<(i32, i32, i32, f64)>,
}

fn hermite_pair(a: &Primitive, b: &Primitive) -> HermitePair {
    let p = a.exponent + b.exponent;
    let (la, lb) = (a.powers, b.powers);
    let q = [
        a.center[0] - b.center[0],
        a.center[1] - b.center[1],
        a.center[2] - b.center[2],
    ];
    let mut terms = Vec::new();
    for t in 0..=(la[0] + lb[0]) as i32 {
        let ex = hermite_e(la[0] as i32, lb[0] as i32, t, q[0], a.exponent, b.exponent);
        for u in 0..=(la[1] + lb[1]) as i32 {
            let ey = hermite_e(la[1] as i32, lb[1] as i32, u, q[1], a.exponent, b.exponent);
            for v in 0..=(la[2] + lb[2]) as i32 {
                let ez = hermite_e(la[2] as i32, lb[2] as i32, v, q[2], a.exponent, b.exponent);
                let c = ex * ey * ez;
                if c != 0.0 {
                    terms.push((t, u, v, c));
                }
            }
        }
    }
    HermitePair {
        p,
        center: product_center(a, b),
        terms,
    }
}

fn eri_pairs(ab: &HermitePair, cd: &HermitePair) -> f64 {
    let (p, q) = (ab.p, cd.p);
    let alpha = p * q / (p + q);
    let pq = [
        ab.center[0] - cd.center[0],
        ab.center[1] - cd.center[1],
        ab.center[2] - cd.center[2],
    ];
    let n_max = ab.terms.iter().map(|t| (t.0 + t.1 + t.2) as usize).max().unwrap_or(0)
        + cd.terms.iter().map(|t| (t.0 + t.1 + t.2) as usize).max().unwrap_or(0);
    let f = scaled_boys(n_max, alpha, pq);
    let mut sum = 0.0;
    for &(t, u, v, e1) in &ab.terms {
        for &(tau, nu, phi, e2) in &cd.terms {
            let sign = if (tau + nu + phi) % 2 == 0 { 1.0 } else { -1.0 };
            sum += e1 * e2 * sign * hermite_r(t + tau, u + nu, v + phi, 0, pq, &f);
        }
    }
    2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt()) * sum
}

pub fn prim_eri(a: &Primitive, b: &Primitive, c: &Primitive, d: &Primitive) -> f64 {
    eri_pairs(&hermite_pair(a, b), &hermite_pair(c, d))
}

pub fn overlap(a: &Contracted, b: &Contracted) -> f64 {
    let mut s = 0.0;
    for pa in a {
        for pb in b {
            s += pa.coefficient * pb.coefficient * prim_overlap(pa, pb);
        }
    }
    s
}

pub fn kinetic(a: &Contracted, b: &Contracted) -> f64 {
    let mut s = 0.0;
    for pa in a {
        for pb in b {
            s += pa.coefficient * pb.coefficient * prim_kinetic(pa, pb);
        }
    }
    s
}

/// ⟨a| 1/|r − C| |b⟩.
pub fn coulomb_1e(a: &Contracted, b: &Contracted, c: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for pa in a {
        for pb in b {
            s += pa.coefficient * pb.coefficient * prim_coulomb_1e(pa, pb, c);
        }
    }
    s
}

/// Two-electron integral (ab|cd) = ∫∫ a(1)b(1) c(2)d(2) / r₁₂ in chemists' notation.
pub fn eri(a: &Contracted, b: &Contracted, c: &Contracted, d: &Contracted) -> f64 {
    let bra: Vec<(f64, HermitePair)> = a
        .iter()
        .flat_map(|pa| b.iter().map(move |pb| (pa.coefficient * pb.coefficient, hermite_pair(pa, pb))))
        .collect();
    let ket: Vec<(f64, HermitePair)> = c
        .iter()
        .flat_map(|pc| d.iter().map(move |pd| (pc.coefficient * pd.coefficient, hermite_pair(pc, pd))))
        .collect();
    let mut s = 0.0;
    for (cb, hb) in &bra {
        for (ck, hk) in &ket {
            s += cb * ck * eri_pairs(hb, hk);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(alpha: f64, center: [f64; 3]) -> Primitive {
        Primitive {
            exponent: alpha,
            coefficient: 1.0,
            center,
            powers: [0, 0, 0],
        }
    }

    #[test]
    fn boys_small_and_large_arguments() {
        // F0(T) = ½√(π/T) erf(√T); compare against the series branch near the switch.
        let lo = boys(4, 34.999);
        let hi = boys(4, 35.001);
        for n in 0..=4 {
            assert!((lo[n] - hi[n]).abs() / lo[n] < 1e-3);
        }
        assert!((boys(0, 1e-15)[0] - 1.0).abs() < 1e-14);
        // F0(1) = 0.746824132812427
        assert!((boys(2, 1.0)[0] - 0.746_824_132_812_427).abs() < 1e-13);
        // F1(1) = (F0(1) − e^{−1})/2
        assert!((boys(2, 1.0)[1] - (0.746_824_132_812_427 - (-1f64).exp()) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn normalized_s_overlap_is_one() {
        let a = 0.8;
        let n = (2.0 * a / PI).powf(0.75);
        let g = Primitive {
            coefficient: n,
            ..s(a, [0.1, 0.2, 0.3])
        };
        assert!((overlap(&[g], &[g]) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn s_kinetic_closed_form() {
        // ⟨g|T|g⟩ = 3α/2 for a normalized s Gaussian
        let a = 1.3;
        let n = (2.0 * a / PI).powf(0.75);
        let g = Primitive {
            coefficient: n,
            ..s(a, [0.0; 3])
        };
        assert!((kinetic(&[g], &[g]) - 1.5 * a).abs() < 1e-13);
    }

    #[test]
    fn s_nuclear_attraction_closed_form() {
        // ⟨g|1/r|g⟩ = 2√(2α/π) for a normalized s Gaussian at the nucleus
        let a = 0.7;
        let n = (2.0 * a / PI).powf(0.75);
        let g = Primitive {
            coefficient: n,
            ..s(a, [0.0; 3])
        };
        let v = coulomb_1e(&[g], &[g], [0.0; 3]);
        assert!((v - 2.0 * (2.0 * a / PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn distant_charge_distributions_interact_as_points() {
        let a = 1.0;
        let n = (2.0 * a / PI).powf(0.75);
        let g1 = Primitive {
            coefficient: n,
            ..s(a, [0.0; 3])
        };
        let g2 = Primitive {
            coefficient: n,
            ..s(a, [0.0, 0.0, 20.0])
        };
        let j = eri(&[g1], &[g1], &[g2], &[g2]);
        assert!((j - 1.0 / 20.0).abs() < 1e-12);
    }

    #[test]
    fn p_function_overlap_matches_derivative_identity() {
        // ⟨x e^{-a r²} | x e^{-a r²}⟩ = (π/2a)^{3/2} / (4a)
        let a = 0.9;
        let px = Primitive {
            exponent: a,
            coefficient: 1.0,
            center: [0.0; 3],
            powers: [1, 0, 0],
        };
        let expect = (PI / (2.0 * a)).powf(1.5) / (4.0 * a);
        assert!((overlap(&[px], &[px]) - expect).abs() < 1e-14);
    }

    #[test]
    fn eri_symmetries_hold_for_p_functions() {
        let p = Primitive {
            exponent: 0.6,
            coefficient: 1.0,
            center: [0.0, 0.0, 0.0],
            powers: [0, 0, 1],
        };
        let q = s(1.1, [0.3, -0.2, 1.5]);
        let r = Primitive {
            exponent: 0.4,
            coefficient: 1.0,
            center: [0.5, 0.5, -0.5],
            powers: [1, 0, 0],
        };
        let v1 = prim_eri(&p, &q, &r, &q);
        let v2 = prim_eri(&q, &p, &r, &q);
        let v3 = prim_eri(&r, &q, &p, &q);
        assert!((v1 - v2).abs() < 1e-13);
        assert!((v1 - v3).abs() < 1e-13);
    }
}
