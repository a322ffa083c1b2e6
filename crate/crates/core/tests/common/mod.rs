//! Shared generators and independent oracles for the integration suites.
//!
//! Everything here is deliberately written from first principles (explicit
//! index loops, Taylor series, dense Kronecker assembly) so it exercises
//! none of the library's own computation paths.

#![allow(dead_code)]

use einsel_core::entity::EntitySet;
use einsel_core::hamiltonian::{HamiltonianTerms, Pauli, PauliTerm};
use einsel_core::qcore::{Operator, OperatorKind, StateVector};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

pub type C64 = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform in [-1, 1).
pub fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (2.0 / 9007199254740992.0) - 1.0
}

pub fn random_complex(rng: &mut ChaCha20Rng) -> C64 {
    C64::new(uniform(rng), uniform(rng))
}

pub fn random_state(rng: &mut ChaCha20Rng, dim: usize) -> StateVector<f64> {
    loop {
        let v = DVector::from_iterator(dim, (0..dim).map(|_| random_complex(rng)));
        if v.norm() > 1e-3 {
            return StateVector::normalized(v).unwrap();
        }
    }
}

pub fn random_hermitian(rng: &mut ChaCha20Rng, dim: usize, scale: f64) -> Operator<f64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng).scale(scale));
    let herm = (&m + m.adjoint()).map(|z| z.scale(0.5));
    Operator::new(herm, OperatorKind::Hermitian).unwrap()
}

pub fn random_general(rng: &mut ChaCha20Rng, dim: usize, scale: f64) -> Operator<f64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng).scale(scale));
    Operator::new(m, OperatorKind::General).unwrap()
}

/// Random POVM via `E_i = S^{-1/2} M_i M_i^H S^{-1/2}` with `S = Σ M_i M_i^H`.
pub fn random_povm(rng: &mut ChaCha20Rng, dim: usize, effects: usize) -> Vec<DMatrix<C64>> {
    let gs: Vec<DMatrix<C64>> = (0..effects)
        .map(|_| {
            let m = DMatrix::from_fn(dim, dim, |_, _| random_complex(rng));
            &m * m.adjoint()
        })
        .collect();
    let mut total = DMatrix::<C64>::zeros(dim, dim);
    for g in &gs {
        total += g;
    }
    let inv_root = inverse_sqrt_hermitian(&total);
    gs.iter().map(|g| &inv_root * g * &inv_root).collect()
}

fn inverse_sqrt_hermitian(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let mut scaled = eig.eigenvectors.clone();
    for (col, lam) in eig.eigenvalues.iter().enumerate() {
        let inv_root = 1.0 / lam.max(1e-300).sqrt();
        for r in 0..scaled.nrows() {
            scaled[(r, col)] *= C64::new(inv_root, 0.0);
        }
    }
    scaled * eig.eigenvectors.adjoint()
}

/// Random 2-local Pauli Hamiltonian: every single entity and entity pair
/// gets a random Pauli assignment with probability ~1/2 each.
pub fn random_2local(rng: &mut ChaCha20Rng, entities: usize, scale: f64) -> HamiltonianTerms<f64> {
    random_2local_filtered(rng, entities, scale, |_| true)
}

/// Random 2-local Hamiltonian keeping only terms whose support passes the
/// filter.
pub fn random_2local_filtered(
    rng: &mut ChaCha20Rng,
    entities: usize,
    scale: f64,
    keep: impl Fn(&EntitySet) -> bool,
) -> HamiltonianTerms<f64> {
    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    let mut terms = Vec::new();
    for i in 0..entities {
        if rng.next_u64() % 2 == 0 {
            let p = paulis[(rng.next_u64() % 3) as usize];
            let term = PauliTerm::new(uniform(rng) * scale, [(i, p)]);
            if keep(&term.support()) {
                terms.push(term);
            }
        }
        for j in (i + 1)..entities {
            if rng.next_u64() % 2 == 0 {
                let p = paulis[(rng.next_u64() % 3) as usize];
                let q = paulis[(rng.next_u64() % 3) as usize];
                let term = PauliTerm::new(uniform(rng) * scale, [(i, p), (j, q)]);
                if keep(&term.support()) {
                    terms.push(term);
                }
            }
        }
    }
    HamiltonianTerms::build(entities, terms).unwrap()
}

pub fn pauli_matrix(p: Option<Pauli>) -> DMatrix<C64> {
    match p {
        None => DMatrix::identity(2, 2),
        Some(Pauli::X) => {
            DMatrix::from_row_slice(2, 2, &[C64::new(0., 0.), C64::new(1., 0.), C64::new(1., 0.), C64::new(0., 0.)])
        }
        Some(Pauli::Y) => DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0., 0.), C64::new(0., -1.), C64::new(0., 1.), C64::new(0., 0.)],
        ),
        Some(Pauli::Z) => DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1., 0.), C64::new(0., 0.), C64::new(0., 0.), C64::new(-1., 0.)],
        ),
    }
}

/// Dense assembly of a term list by explicit Kronecker products, entity 0
/// as the most significant factor.
pub fn kron_assemble(h: &HamiltonianTerms<f64>, entities: usize) -> DMatrix<C64> {
    let dim = 1usize << entities;
    let mut acc = DMatrix::<C64>::zeros(dim, dim);
    for term in h.terms() {
        let factors: std::collections::BTreeMap<usize, Pauli> = term.factors().collect();
        let mut m = DMatrix::<C64>::identity(1, 1);
        for e in 0..entities {
            m = m.kronecker(&pauli_matrix(factors.get(&e).copied()));
        }
        acc += m.map(|z| z.scale(term.coefficient));
    }
    if h.identity_offset() != 0.0 {
        for i in 0..dim {
            acc[(i, i)] += C64::new(h.identity_offset(), 0.0);
        }
    }
    acc
}

/// Largest singular value straight from nalgebra, bypassing the library's
/// kind dispatch.
pub fn dense_spectral_norm(m: &DMatrix<C64>) -> f64 {
    if m.iter().all(|z| z.norm() == 0.0) {
        return 0.0;
    }
    m.clone().singular_values().iter().fold(0.0f64, |a, &s| a.max(s))
}

/// `e^{-iHt}` by 4th-order Taylor with scaling and squaring.
pub fn expm_taylor(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let dim = h.nrows();
    let a = h.map(|z| z * C64::new(0.0, -t));
    let norm = a.iter().fold(0.0f64, |acc, z| acc.max(z.norm())) * dim as f64;
    let mut squarings = 0u32;
    let mut scale = 1.0f64;
    while norm * scale > 0.02 {
        squarings += 1;
        scale /= 2.0;
    }
    let scaled = a.map(|z| z.scale(scale));
    let mut result = DMatrix::<C64>::identity(dim, dim);
    let mut power = DMatrix::<C64>::identity(dim, dim);
    let mut factorial = 1.0f64;
    for order in 1..=4u32 {
        power = &power * &scaled;
        factorial *= order as f64;
        result += power.map(|z| z.unscale(factorial));
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Reduced density matrix by the direct double sum over traced indices,
/// written with string-formatted bit bookkeeping.
pub fn partial_trace_oracle(
    rho: &DMatrix<C64>,
    keep: &[usize],
    entities: usize,
) -> DMatrix<C64> {
    let traced: Vec<usize> = (0..entities).filter(|e| !keep.contains(e)).collect();
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let compose = |positions: &[usize], sub: usize| -> usize {
        // Write the sub-index bits into a full bit string, entity 0 first.
        let mut bits = vec!['0'; entities];
        for (p, &e) in positions.iter().enumerate() {
            let bit = (sub >> (positions.len() - 1 - p)) & 1;
            bits[e] = if bit == 1 { '1' } else { '0' };
        }
        bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | if b == '1' { 1 } else { 0 })
    };
    let mut out = DMatrix::<C64>::zeros(dk, dk);
    for rk in 0..dk {
        for ck in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for tr in 0..dt {
                let row = compose(keep, rk) + compose(&traced, tr);
                let col = compose(keep, ck) + compose(&traced, tr);
                acc += rho[(row, col)];
            }
            out[(rk, ck)] = acc;
        }
    }
    out
}

/// Reshuffles a bipartite operator `H` on `C^{da} ⊗ C^{db}` into the
/// `da² × db²` matrix whose SVD is the operator-Schmidt decomposition.
pub fn reshuffle(h: &DMatrix<C64>, da: usize, db: usize) -> DMatrix<C64> {
    let mut r = DMatrix::<C64>::zeros(da * da, db * db);
    for a1 in 0..da {
        for a2 in 0..da {
            for b1 in 0..db {
                for b2 in 0..db {
                    r[(a1 * da + a2, b1 * db + b2)] = h[(a1 * db + b1, a2 * db + b2)];
                }
            }
        }
    }
    r
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}
