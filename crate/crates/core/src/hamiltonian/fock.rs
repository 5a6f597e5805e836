//! Two-electron Hamiltonian in the S_z = 0 sector by second quantization.
//!
//! Spin-orbital `p = 2·orbital + spin` (spin 0 = ↑, 1 = ↓). Occupation
//! states are canonical products `c†_{p₁}c†_{p₂}|vac⟩` with p₁ < p₂.

use crate::integrals::Tensor4;
use crate::orbitals::Mat2;

use super::eigen::Mat4;

/// Creation sequences of the basis {|0,↑↓⟩, |↓↑⟩, |↑↓⟩, |↑↓,0⟩}, outermost
/// operator first: |↓↑⟩ = c†_{2↑}c†_{1↓}|vac⟩, |↑↓⟩ = c†_{1↑}c†_{2↓}|vac⟩.
pub const BASIS: [[usize; 2]; 4] = [[2, 3], [2, 1], [0, 3], [0, 1]];

fn canonical(seq: [usize; 2]) -> (u8, f64) {
    let mask = (1u8 << seq[0]) | (1u8 << seq[1]);
    let sign = if seq[0] < seq[1] { 1.0 } else { -1.0 };
    (mask, sign)
}

fn parity_below(mask: u8, p: usize) -> f64 {
    if (mask & ((1u8 << p) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn annihilate(state: (u8, f64), p: usize) -> Option<(u8, f64)> {
    let (mask, amp) = state;
    if mask & (1 << p) == 0 {
        return None;
    }
    Some((mask & !(1 << p), amp * parity_below(mask, p)))
}

fn create(state: (u8, f64), p: usize) -> Option<(u8, f64)> {
    let (mask, amp) = state;
    if mask & (1 << p) != 0 {
        return None;
    }
    Some((mask | (1 << p), amp * parity_below(mask, p)))
}

/// Matrix of H = Σ h_pq c†_p c_q + ½ Σ ⟨pq|rs⟩ c†_p c†_q c_s c_r in [`BASIS`].
pub fn second_quantized_matrix(h: &Mat2, v: &Tensor4) -> Mat4 {
    let orb = |p: usize| p / 2;
    let spin = |p: usize| p % 2;
    let kets: Vec<(u8, f64)> = BASIS.iter().map(|&s| canonical(s)).collect();
    let mut out = [[0.0; 4]; 4];
    for (b, &(ket_mask, ket_sign)) in kets.iter().enumerate() {
        let mut images: Vec<(u8, f64)> = Vec::new();
        let start = (ket_mask, 1.0);
        for p in 0..4 {
            for q in 0..4 {
                if spin(p) != spin(q) {
                    continue;
                }
                let coef = h[orb(p)][orb(q)];
                if let Some(s) = annihilate(start, q).and_then(|s| create(s, p)) {
                    images.push((s.0, coef * s.1));
                }
            }
        }
        for p in 0..4 {
            for q in 0..4 {
                for r in 0..4 {
                    for s in 0..4 {
                        if spin(p) != spin(r) || spin(q) != spin(s) {
                            continue;
                        }
                        let coef = 0.5 * v[orb(p)][orb(q)][orb(r)][orb(s)];
                        let img = annihilate(start, r)
                            .and_then(|x| annihilate(x, s))
                            .and_then(|x| create(x, q))
                            .and_then(|x| create(x, p));
                        if let Some(x) = img {
                            images.push((x.0, coef * x.1));
                        }
                    }
                }
            }
        }
        for (a, &(bra_mask, bra_sign)) in kets.iter().enumerate() {
            let amp: f64 = images
                .iter()
                .filter(|(m, _)| *m == bra_mask)
                .map(|(_, x)| x)
                .sum();
            out[a][b] = bra_sign * ket_sign * amp;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopping_enters_every_coupling_with_the_same_sign() {
        let h = [[0.0, -0.2], [-0.2, 0.0]];
        let m = second_quantized_matrix(&h, &[[[[0.0; 2]; 2]; 2]; 2]);
        for (a, b) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            assert_eq!(m[a][b], -0.2, "({a},{b})");
            assert_eq!(m[b][a], -0.2);
        }
        assert_eq!(m[0][3], 0.0);
        assert_eq!(m[1][2], 0.0);
    }

    #[test]
    fn diagonal_energies() {
        let h = [[0.3, 0.0], [0.0, -0.1]];
        let mut v = [[[[0.0; 2]; 2]; 2]; 2];
        v[0][0][0][0] = 2.0;
        v[1][1][1][1] = 1.5;
        v[0][1][0][1] = 0.7;
        v[1][0][1][0] = 0.7;
        let m = second_quantized_matrix(&h, &v);
        assert!((m[0][0] - (1.5 - 0.2)).abs() < 1e-15);
        assert!((m[1][1] - (0.7 + 0.2)).abs() < 1e-15);
        assert!((m[2][2] - (0.7 + 0.2)).abs() < 1e-15);
        assert!((m[3][3] - (2.0 + 0.6)).abs() < 1e-15);
    }

    #[test]
    fn exchange_couples_the_open_shell_states() {
        let mut v = [[[[0.0; 2]; 2]; 2]; 2];
        v[0][1][1][0] = 0.05;
        v[1][0][0][1] = 0.05;
        let m = second_quantized_matrix(&[[0.0; 2]; 2], &v);
        assert!((m[1][2].abs() - 0.05).abs() < 1e-15);
        assert_eq!(m[1][2], m[2][1]);
        // The triplet (0, 1, −1, 0)/√2 stays an eigenvector.
        assert!((m[1][1] - m[2][2]).abs() < 1e-15);
    }
}
