//! Closed-form structure of two-qubit scramblers.
//!
//! For a 4x4 unitary, `U°U°† = 𝟙 + [[a·σ, b̄·σ], [b·σ, −a·σ]]` in 2x2 blocks
//! over the `L` factor, and `|U°†|` has the same shape with constant `c′`
//! and vectors `a′`, `b′`. Squaring the second form gives the first, which
//! fixes `(a, b)` in terms of `(c′, a′, b′)`. The `L`-trace is `2c′·I`, so the
//! maximally entangled probe is already optimal.

use serde::Serialize;

use super::ProbeOperator;
use crate::error::{HackError, Result};
use crate::tensor::{abs_polar_parts, default_cutoff, rotate_pi_half, ComplexMatrix, ScramblerDims, C64};

const STRUCTURE_TOL: f64 = 1e-8;
const RELATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct TwoQubitParams {
    pub c_prime: f64,
    pub a_prime: [f64; 3],
    pub b_prime_re: [f64; 3],
    pub b_prime_im: [f64; 3],
    /// Largest violation among the norm identity and the three vector identities.
    pub relation_residual: f64,
    #[serde(skip)]
    pub chi_opt: ProbeOperator,
}

fn paulis() -> [ComplexMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        ComplexMatrix::new(2, 2, vec![z, one, one, z]).unwrap(),
        ComplexMatrix::new(2, 2, vec![z, -i, i, z]).unwrap(),
        ComplexMatrix::new(2, 2, vec![one, z, z, -one]).unwrap(),
    ]
}

struct BlockForm {
    constant: f64,
    diag: [f64; 3],
    off: [C64; 3],
}

/// Reads `(c, a, b)` off `h = [[c + a·σ, b̄·σ], [b·σ, c − a·σ]]` and checks
/// that `h` really has that shape.
fn block_form(h: &ComplexMatrix, what: &str) -> Result<BlockForm> {
    let s = paulis();
    let tl = h.block(0, 0, 2, 2);
    let br = h.block(2, 2, 2, 2);
    let bl = h.block(2, 0, 2, 2);
    let constant = ((tl.trace() + br.trace()) / 4.0).re;
    let diag = [0, 1, 2].map(|k| (tl.inner(&s[k]).conj() / 2.0).re);
    let off = [0, 1, 2].map(|k| s[k].inner(&bl) / 2.0);

    let mut rebuilt = ComplexMatrix::zeros(4, 4);
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { constant } else { 0.0 };
            let mut d = C64::new(id, 0.0);
            let mut o = C64::new(0.0, 0.0);
            let mut oc = C64::new(0.0, 0.0);
            for k in 0..3 {
                d += s[k][(r, c)] * diag[k];
                o += s[k][(r, c)] * off[k];
                oc += s[k][(r, c)] * off[k].conj();
            }
            rebuilt[(r, c)] = d;
            rebuilt[(r + 2, c + 2)] = C64::new(2.0 * id, 0.0) - d;
            rebuilt[(r + 2, c)] = o;
            rebuilt[(r, c + 2)] = oc;
        }
    }
    let dev = rebuilt.distance(h);
    if dev > STRUCTURE_TOL {
        return Err(HackError::InternalConsistency(format!(
            "{what} deviates from the two-qubit block form by {dev:e}"
        )));
    }
    Ok(BlockForm { constant, diag, off })
}

fn cross(x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]]
}

fn max_dev(x: [f64; 3], y: [f64; 3]) -> f64 {
    (0..3).map(|k| (x[k] - y[k]).abs()).fold(0.0, f64::max)
}

pub fn two_qubit_exact(u: &ComplexMatrix) -> Result<TwoQubitParams> {
    let dims = ScramblerDims::square(2, 2)?;
    let uo = rotate_pi_half(u, &dims)?;
    let defect = u.unitarity_defect();
    if defect > 1e-8 {
        return Err(HackError::Validation(format!("two-qubit input is not unitary (defect {defect:e})")));
    }
    let gram = &uo * &uo.adjoint();
    let outer = block_form(&gram, "U°U°†")?;
    let absdag = abs_polar_parts(&uo, default_cutoff(&uo))?.absdag;
    let inner = block_form(&absdag, "|U°†|")?;

    let c = inner.constant;
    let ap = inner.diag;
    let bre = inner.off.map(|z| z.re);
    let bim = inner.off.map(|z| z.im);
    let sq = |v: [f64; 3]| v.iter().map(|x| x * x).sum::<f64>();

    // 2c′v − 2x for each of the three squared-form identities.
    let lin = |v: [f64; 3], x: [f64; 3]| [0, 1, 2].map(|k| 2.0 * c * v[k] - 2.0 * x[k]);
    let a_pred = lin(ap, cross(bre, bim));
    let bre_pred = lin(bre, cross(bim, ap));
    let bim_pred = lin(bim, cross(ap, bre));

    let residual = [
        (c * c + sq(ap) + sq(bre) + sq(bim) - 1.0).abs(),
        (outer.constant - 1.0).abs(),
        max_dev(outer.diag, a_pred),
        max_dev(outer.off.map(|z| z.re), bre_pred),
        max_dev(outer.off.map(|z| z.im), bim_pred),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if residual > RELATION_TOL {
        return Err(HackError::InternalConsistency(format!("two-qubit identities violated by {residual:e}")));
    }
    Ok(TwoQubitParams {
        c_prime: c,
        a_prime: ap,
        b_prime_re: bre,
        b_prime_im: bim,
        relation_residual: residual,
        chi_opt: ProbeOperator::maximally_entangled(2),
    })
}
