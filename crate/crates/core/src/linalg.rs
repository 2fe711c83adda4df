// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-qubit state vectors and small dense matrix helpers.
//!
//! Basis order is (|00>, |01>, |10>, |11>) with index `2*q0 + q1`; qubit 0 is
//! the left bit of every label.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Matrix4c = Matrix4<C64>;
pub type Vector4c = Vector4<C64>;

pub const IDX_00: usize = 0;
pub const IDX_01: usize = 1;
pub const IDX_10: usize = 2;
pub const IDX_11: usize = 3;

pub const BASIS_LABELS: [&str; 4] = ["00", "01", "10", "11"];

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Statevector(Vector4c);

impl Statevector {
    pub fn from_amplitudes(amps: [C64; 4]) -> Self {
        Statevector(Vector4c::new(amps[0], amps[1], amps[2], amps[3]))
    }

    pub fn from_vector(v: Vector4c) -> Self {
        Statevector(v)
    }

    pub fn basis(index: usize) -> Self {
        let mut v = Vector4c::zeros();
        v[index] = ONE;
        Statevector(v)
    }

    /// The shared ground state |00>, which is |1> of the three-level model.
    pub fn ground() -> Self {
        Self::basis(IDX_00)
    }

    pub fn as_vector(&self) -> &Vector4c {
        &self.0
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.0[index]
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn normalized(&self) -> Self {
        Statevector(self.0 / C64::from(self.norm()))
    }

    pub fn populations(&self) -> [f64; 4] {
        [
            self.0[0].norm_sqr(),
            self.0[1].norm_sqr(),
            self.0[2].norm_sqr(),
            self.0[3].norm_sqr(),
        ]
    }

    /// <self|other>
    pub fn inner(&self, other: &Statevector) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn apply(&self, m: &Matrix4c) -> Statevector {
        Statevector(m * self.0)
    }

    /// Distance after removing a global phase: min over phi of |a - e^{i phi} b|.
    pub fn phase_distance(&self, other: &Statevector) -> f64 {
        let ov = other.inner(self);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        (self.0 - other.0 * phase).norm()
    }
}

pub fn populations(psi: &Statevector) -> [f64; 4] {
    psi.populations()
}

pub fn max_hermitian_defect(h: &Matrix4c) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..4 {
        for c in 0..4 {
            worst = worst.max((h[(r, c)] - h[(c, r)].conj()).norm());
        }
    }
    worst
}

/// exp(-i H dt) for Hermitian `h`.
///
/// Rows and columns that are identically zero are left as identity, so an
/// uncoupled level picks up no numerical noise at all.
pub fn expm_hermitian(h: &Matrix4c, dt: f64) -> Matrix4c {
    let active: Vec<usize> = (0..4)
        .filter(|&i| (0..4).any(|j| h[(i, j)] != ZERO || h[(j, i)] != ZERO))
        .collect();
    let mut out = Matrix4c::identity();
    if active.is_empty() {
        return out;
    }
    let n = active.len();
    let mut sub = nalgebra::DMatrix::<C64>::zeros(n, n);
    for (a, &i) in active.iter().enumerate() {
        for (b, &j) in active.iter().enumerate() {
            sub[(a, b)] = h[(i, j)];
        }
    }
    // symmetrize against rounding so the eigensolver sees an exactly Hermitian input
    let sub = (&sub + sub.adjoint()) * C64::from(0.5);
    let eig = sub.symmetric_eigen();
    let mut phases = nalgebra::DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        phases[(k, k)] = (-I * eig.eigenvalues[k] * dt).exp();
    }
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    for (a, &i) in active.iter().enumerate() {
        for (b, &j) in active.iter().enumerate() {
            out[(i, j)] = u[(a, b)];
        }
    }
    out
}

pub fn spectral_norm(m: &Matrix4c) -> f64 {
    m.singular_values().max()
}

/// Spectral-norm distance between two unitaries up to a global phase.
///
/// The phase is fixed on the largest-magnitude entry of `b`.
pub fn unitary_distance(a: &Matrix4c, b: &Matrix4c) -> f64 {
    let mut best = (0, 0);
    let mut mag = -1.0;
    for r in 0..4 {
        for c in 0..4 {
            if b[(r, c)].norm() > mag {
                mag = b[(r, c)].norm();
                best = (r, c);
            }
        }
    }
    let ratio = a[best] / b[best];
    let phase = if ratio.norm() > 0.0 { ratio / ratio.norm() } else { ONE };
    spectral_norm(&(a - b * phase))
}

pub fn is_unitary(m: &Matrix4c, tol: f64) -> bool {
    spectral_norm(&(m.adjoint() * m - Matrix4c::identity())) < tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_xx() -> Matrix4c {
        let mut m = Matrix4c::zeros();
        m[(0, 3)] = ONE;
        m[(3, 0)] = ONE;
        m[(1, 2)] = ONE;
        m[(2, 1)] = ONE;
        m
    }

    #[test]
    fn expm_of_xx_matches_closed_form() {
        let th = 0.731;
        let u = expm_hermitian(&pauli_xx(), th);
        let want = Matrix4c::identity() * C64::from(th.cos()) - pauli_xx() * (I * th.sin());
        assert!(spectral_norm(&(u - want)) < 1e-13);
    }

    #[test]
    fn untouched_levels_stay_exact_identity() {
        let mut h = Matrix4c::zeros();
        h[(0, 2)] = C64::new(0.3, 0.4);
        h[(2, 0)] = C64::new(0.3, -0.4);
        let u = expm_hermitian(&h, 1.7);
        assert_eq!(u[(1, 1)], ONE);
        assert_eq!(u[(3, 3)], ONE);
        assert_eq!(u[(1, 0)], ZERO);
        assert!(is_unitary(&u, 1e-13));
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let a = Statevector::from_amplitudes([C64::new(0.6, 0.0), ZERO, C64::new(0.0, 0.8), ZERO]);
        let b = Statevector::from_vector(a.as_vector() * C64::from_polar(1.0, 2.1));
        assert!(a.phase_distance(&b) < 1e-15);
        assert!(unitary_distance(&(pauli_xx() * I), &pauli_xx()) < 1e-15);
    }

    #[test]
    fn defect_detects_asymmetry() {
        let mut h = pauli_xx();
        assert_eq!(max_hermitian_defect(&h), 0.0);
        h[(0, 3)] = C64::new(1.0, 1e-6);
        h[(3, 0)] = C64::new(1.0, 1e-6);
        assert!(max_hermitian_defect(&h) > 1e-6);
    }
}
