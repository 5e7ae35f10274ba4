use super::dims::ScramblerDims;
use super::matrix::{ComplexMatrix, StateVector, C64};
use crate::error::{HackError, Result};
use crate::limits::check_elements;

/// Tensor product `a ⊗ b` with `b`'s indices minor:
/// `(a⊗b)[i·p + k, j·q + l] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() as u128 * b.rows() as u128;
    let cols = a.cols() as u128 * b.cols() as u128;
    check_elements("kron product", rows * cols)?;
    let (p, q) = b.shape();
    let mut out = ComplexMatrix::zeros(a.rows() * p, a.cols() * q);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    out[(i * p + k, j * q + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// `I_n ⊗ x` without materializing the identity.
pub fn kron_identity_left(n: usize, x: &ComplexMatrix) -> ComplexMatrix {
    let (p, q) = x.shape();
    let mut out = ComplexMatrix::zeros(n * p, n * q);
    for blk in 0..n {
        for k in 0..p {
            for l in 0..q {
                out[(blk * p + k, blk * q + l)] = x[(k, l)];
            }
        }
    }
    out
}

/// Traces out the first (major) factor of a square operator on
/// `C^{d_first} ⊗ C^{d_second}`.
pub fn partial_trace_first(m: &ComplexMatrix, d_first: usize, d_second: usize) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != d_first * d_second {
        return Err(HackError::Shape(format!(
            "partial_trace_first: {}x{} operator is not square on a {d_first}x{d_second} product",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(d_second, d_second);
    for i in 0..d_first {
        for j in 0..d_second {
            for l in 0..d_second {
                out[(j, l)] += m[(i * d_second + j, i * d_second + l)];
            }
        }
    }
    Ok(out)
}

/// Traces out the second (minor) factor.
pub fn partial_trace_second(m: &ComplexMatrix, d_first: usize, d_second: usize) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != d_first * d_second {
        return Err(HackError::Shape(format!(
            "partial_trace_second: {}x{} operator is not square on a {d_first}x{d_second} product",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = ComplexMatrix::zeros(d_first, d_first);
    for i in 0..d_first {
        for k in 0..d_first {
            for j in 0..d_second {
                out[(i, k)] += m[(i * d_second + j, k * d_second + j)];
            }
        }
    }
    Ok(out)
}

fn check_scrambler_shape(u: &ComplexMatrix, dims: &ScramblerDims) -> Result<()> {
    let n = dims.total();
    if u.shape() != (n, n) {
        return Err(HackError::Shape(format!(
            "scrambler must be {n}x{n} for dims ({dims}), got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    Ok(())
}

/// The π/2 rotation `U ↦ U°`.
///
/// `u` is `(d_K·d_L) x (d_A·d_B)` with rows indexed `(k, i)` for `k ∈ K`,
/// `i ∈ L` and columns `(l, j)` for `l ∈ A`, `j ∈ B`. The result is the
/// `(d_L·d_B) x (d_K·d_A)` matrix with `U°[(i,j),(k,l)] = U[(k,i),(l,j)]`.
pub fn rotate_pi_half(u: &ComplexMatrix, dims: &ScramblerDims) -> Result<ComplexMatrix> {
    check_scrambler_shape(u, dims)?;
    let ScramblerDims { d_a, d_b, d_k, d_l } = *dims;
    let mut out = ComplexMatrix::zeros(d_l * d_b, d_k * d_a);
    for k in 0..d_k {
        for i in 0..d_l {
            for l in 0..d_a {
                for j in 0..d_b {
                    out[(i * d_b + j, k * d_a + l)] = u[(k * d_l + i, l * d_b + j)];
                }
            }
        }
    }
    Ok(out)
}

/// Inverse index permutation of [`rotate_pi_half`].
pub fn unrotate_pi_half(uo: &ComplexMatrix, dims: &ScramblerDims) -> Result<ComplexMatrix> {
    let ScramblerDims { d_a, d_b, d_k, d_l } = *dims;
    if uo.shape() != (d_l * d_b, d_k * d_a) {
        return Err(HackError::Shape(format!(
            "rotated operator must be {}x{} for dims ({dims}), got {}x{}",
            d_l * d_b,
            d_k * d_a,
            uo.rows(),
            uo.cols()
        )));
    }
    let n = dims.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..d_k {
        for i in 0..d_l {
            for l in 0..d_a {
                for j in 0..d_b {
                    out[(k * d_l + i, l * d_b + j)] = uo[(i * d_b + j, k * d_a + l)];
                }
            }
        }
    }
    Ok(out)
}

/// `Σ_{i<min(d1,d2)} |ii⟩ / √min(d1,d2)` in the row-major product ordering.
pub fn max_entangled_vector(d1: usize, d2: usize) -> StateVector {
    let r = d1.min(d2);
    let amp = C64::new(1.0 / (r as f64).sqrt(), 0.0);
    let mut v = vec![C64::new(0.0, 0.0); d1 * d2];
    for i in 0..r {
        v[i * d2 + i] = amp;
    }
    v
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "vdot: length mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn kron_of_identities_and_diagonals() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
        let d = kron(&ComplexMatrix::from_real_diag(&[1.0, 2.0]), &ComplexMatrix::from_real_diag(&[3.0, 4.0])).unwrap();
        assert_eq!(d, ComplexMatrix::from_real_diag(&[3.0, 4.0, 6.0, 8.0]));
    }

    #[test]
    fn kron_identity_left_matches_kron() {
        let x = ComplexMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64 - 1.0));
        assert_eq!(kron_identity_left(3, &x), kron(&ComplexMatrix::identity(3), &x).unwrap());
    }

    #[test]
    fn partial_trace_of_identity() {
        let t = partial_trace_first(&ComplexMatrix::identity(4), 2, 2).unwrap();
        assert_eq!(t, ComplexMatrix::from_real_diag(&[2.0, 2.0]));
        assert!(partial_trace_first(&ComplexMatrix::identity(6), 4, 2).is_err());
        assert!(partial_trace_first(&ComplexMatrix::zeros(4, 2), 2, 2).is_err());
    }

    #[test]
    fn rotation_of_identity_is_rank_one() {
        let dims = ScramblerDims::square(2, 2).unwrap();
        let uo = rotate_pi_half(&ComplexMatrix::identity(4), &dims).unwrap();
        let v = [c(1.0), c(0.0), c(0.0), c(1.0)];
        assert_eq!(uo, ComplexMatrix::outer(&v, &v));
    }

    #[test]
    fn rotation_rejects_wrong_shape() {
        let dims = ScramblerDims::square(2, 3).unwrap();
        assert!(matches!(rotate_pi_half(&ComplexMatrix::identity(4), &dims), Err(HackError::Shape(_))));
    }

    #[test]
    fn max_entangled_ordering() {
        let s = 1.0 / 2f64.sqrt();
        assert_eq!(max_entangled_vector(2, 2), vec![c(s), c(0.0), c(0.0), c(s)]);
        let v = max_entangled_vector(2, 3);
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], c(s));
        assert_eq!(v[4], c(s));
        assert!((vector_norm(&v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduced_state_of_max_entangled_is_maximally_mixed() {
        for (d1, d2) in [(2, 3), (3, 2), (4, 4)] {
            let v = max_entangled_vector(d1, d2);
            let rho = ComplexMatrix::outer(&v, &v);
            let small = d1.min(d2);
            let reduced = if d1 <= d2 {
                partial_trace_second(&rho, d1, d2).unwrap()
            } else {
                partial_trace_first(&rho, d1, d2).unwrap()
            };
            let expect = ComplexMatrix::identity(small).scale_real(1.0 / small as f64);
            assert!(reduced.distance(&expect) < 1e-15);
        }
    }
}
