use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::{CMatrix, CVector};
use crate::error::{Error, Result};

/// Input to [`entanglement_metrics`].
#[derive(Debug, Clone)]
pub enum TwoQubit {
    State(CVector),
    Unitary(CMatrix),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementMetrics {
    pub concurrence: Option<f64>,
    /// Bits.
    pub entropy: Option<f64>,
    pub entangling_power: Option<f64>,
}

/// Concurrence of a pure two-qubit state, 2|ad − bc|.
pub fn concurrence(state: &CVector) -> Result<f64> {
    if state.len() != 4 {
        return Err(Error::Shape(format!(
            "concurrence needs a two-qubit state, got length {}",
            state.len()
        )));
    }
    let n = state.norm_squared();
    Ok((2.0 * (state[0] * state[3] - state[1] * state[2]).norm() / n).min(1.0))
}

fn shannon_bits(p: impl Iterator<Item = f64>) -> f64 {
    p.filter(|&x| x > 0.0).map(|x| -x * x.log2()).sum::<f64>().max(0.0)
}

/// Von Neumann entropy (bits) of the first `dim_a` factor of a pure state.
pub fn entanglement_entropy(state: &CVector, dim_a: usize) -> Result<f64> {
    if dim_a == 0 || state.len() % dim_a != 0 {
        return Err(Error::Shape(format!(
            "cannot split a length-{} state with a {dim_a}-dimensional factor",
            state.len()
        )));
    }
    let dim_b = state.len() / dim_a;
    let m = CMatrix::from_fn(dim_a, dim_b, |a, b| state[a * dim_b + b]);
    let s = m.singular_values();
    let total: f64 = s.iter().map(|x| x * x).sum();
    Ok(shannon_bits(s.iter().map(|x| x * x / total)))
}

/// Operator-Schmidt decomposition U = Σ sₖ Aₖ ⊗ Bₖ with ‖Aₖ‖ = ‖Bₖ‖ = 1
/// (Frobenius). Coefficients are sorted in decreasing order.
pub struct OperatorSchmidt {
    pub coefficients: DVector<f64>,
    pub left: Vec<CMatrix>,
    pub right: Vec<CMatrix>,
}

pub fn operator_schmidt(u: &CMatrix, dim_a: usize, dim_b: usize) -> Result<OperatorSchmidt> {
    let d = dim_a * dim_b;
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::Shape(format!(
            "operator of size {}×{} does not factor as {dim_a}⊗{dim_b}",
            u.nrows(),
            u.ncols()
        )));
    }
    let realigned = CMatrix::from_fn(dim_a * dim_a, dim_b * dim_b, |r, c| {
        let (a, ap) = (r / dim_a, r % dim_a);
        let (b, bp) = (c / dim_b, c % dim_b);
        u[(a * dim_b + b, ap * dim_b + bp)]
    });
    let svd = realigned.svd(true, true);
    let uu = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let coefficients = DVector::from_iterator(order.len(), order.iter().map(|&k| svd.singular_values[k]));
    let left = order
        .iter()
        .map(|&k| CMatrix::from_fn(dim_a, dim_a, |a, ap| uu[(a * dim_a + ap, k)]))
        .collect();
    let right = order
        .iter()
        .map(|&k| CMatrix::from_fn(dim_b, dim_b, |b, bp| vt[(k, b * dim_b + bp)]))
        .collect();
    Ok(OperatorSchmidt {
        coefficients,
        left,
        right,
    })
}

impl OperatorSchmidt {
    /// Weights sₖ²/Σs².
    pub fn weights(&self) -> Vec<f64> {
        let total: f64 = self.coefficients.iter().map(|s| s * s).sum();
        self.coefficients.iter().map(|s| s * s / total).collect()
    }

    /// Operator entanglement in bits.
    pub fn entropy(&self) -> f64 {
        shannon_bits(self.weights().into_iter())
    }
}

fn swap() -> CMatrix {
    let mut s = CMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        s[(r, c)] = Complex64::new(1.0, 0.0);
    }
    s
}

fn linear_operator_entropy(u: &CMatrix) -> Result<f64> {
    let w = operator_schmidt(u, 2, 2)?.weights();
    Ok(1.0 - w.iter().map(|x| x * x).sum::<f64>())
}

/// Mean linear entropy generated from uniformly random product states:
/// (4/9)[E(U) + E(U·SWAP) − E(SWAP)], in [0, 2/9].
pub fn entangling_power(u: &CMatrix) -> Result<f64> {
    if u.nrows() != 4 || u.ncols() != 4 {
        return Err(Error::Shape("entangling power needs a 4×4 unitary".into()));
    }
    let s = swap();
    let e = linear_operator_entropy(u)? + linear_operator_entropy(&(u * &s))?
        - linear_operator_entropy(&s)?;
    Ok((4.0 / 9.0 * e).clamp(0.0, 2.0 / 9.0))
}

pub fn entanglement_metrics(input: &TwoQubit) -> Result<EntanglementMetrics> {
    match input {
        TwoQubit::State(psi) => {
            if (psi.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::Precondition("state must be normalized".into()));
            }
            Ok(EntanglementMetrics {
                concurrence: Some(concurrence(psi)?),
                entropy: Some(entanglement_entropy(psi, 2)?),
                entangling_power: None,
            })
        }
        TwoQubit::Unitary(u) => {
            if u.nrows() != 4 || u.ncols() != 4 {
                return Err(Error::Shape("expected a 4×4 unitary".into()));
            }
            let dev = (u.adjoint() * u - CMatrix::identity(4, 4)).norm();
            if dev > 1e-8 {
                return Err(Error::Precondition(format!("operator is not unitary ({dev:.1e})")));
            }
            Ok(EntanglementMetrics {
                concurrence: None,
                entropy: Some(operator_schmidt(u, 2, 2)?.entropy()),
                entangling_power: Some(entangling_power(u)?),
            })
        }
    }
}

/// Closest unitary in Frobenius norm.
pub(crate) fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = m.clone().svd(true, true);
    svd.u.expect("requested") * svd.v_t.expect("requested")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn cnot() -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            m[(r, col)] = c(1.0);
        }
        m
    }

    fn sqrt_swap() -> CMatrix {
        let a = Complex64::new(0.5, 0.5);
        let b = Complex64::new(0.5, -0.5);
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(1.0);
        m[(3, 3)] = c(1.0);
        m[(1, 1)] = a;
        m[(2, 2)] = a;
        m[(1, 2)] = b;
        m[(2, 1)] = b;
        m
    }

    fn random_qubit(rng: &mut ChaCha8Rng) -> CVector {
        let v = CVector::from_fn(2, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let n = v.norm();
        v / c(n)
    }

    fn monte_carlo_power(u: &CMatrix, samples: usize) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut acc = 0.0;
        for _ in 0..samples {
            let psi = u * random_qubit(&mut rng).kronecker(&random_qubit(&mut rng));
            let m = CMatrix::from_fn(2, 2, |a, b| psi[a * 2 + b]);
            let rho = &m * m.adjoint();
            acc += 1.0 - (&rho * &rho).trace().re;
        }
        acc / samples as f64
    }

    #[test]
    fn bell_state_is_maximally_entangled() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let bell = CVector::from_vec(vec![c(r), c(0.0), c(0.0), c(r)]);
        let m = entanglement_metrics(&TwoQubit::State(bell)).unwrap();
        assert_relative_eq!(m.concurrence.unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(m.entropy.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn product_inputs_give_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = random_qubit(&mut rng).kronecker(&random_qubit(&mut rng));
        let m = entanglement_metrics(&TwoQubit::State(psi)).unwrap();
        assert!(m.concurrence.unwrap() < 1e-12);
        assert!(m.entropy.unwrap() < 1e-10);
        let local = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
            .kronecker(&CMatrix::identity(2, 2));
        assert!(entangling_power(&local).unwrap() < 1e-12);
    }

    #[test]
    fn concurrence_rejects_wrong_shape() {
        let v = CVector::from_element(8, c(1.0 / 8f64.sqrt()));
        assert!(matches!(concurrence(&v), Err(Error::Shape(_))));
    }

    #[test]
    fn standard_gate_powers() {
        assert_relative_eq!(entangling_power(&cnot()).unwrap(), 2.0 / 9.0, epsilon = 1e-12);
        assert!(entangling_power(&swap()).unwrap() < 1e-12);
        assert_relative_eq!(entangling_power(&sqrt_swap()).unwrap(), 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn closed_form_matches_monte_carlo() {
        for u in [sqrt_swap(), cnot()] {
            let exact = entangling_power(&u).unwrap();
            let mc = monte_carlo_power(&u, 400_000);
            assert!((exact - mc).abs() < 1e-3, "{exact} vs {mc}");
        }
    }

    #[test]
    fn operator_schmidt_of_product_is_rank_one() {
        let a = sqrt_swap();
        let b = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let d = operator_schmidt(&a.kronecker(&b), 4, 2).unwrap();
        assert!(d.entropy() < 1e-10);
        let rebuilt = d.left[0].kronecker(&d.right[0]) * c(d.coefficients[0]);
        assert!((rebuilt - a.kronecker(&b)).norm() < 1e-10);
    }
}
