// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Adaptive Gauss-Kronrod (7/15) quadrature.

#![allow(clippy::excessive_precision)]

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut stack = vec![(lo, hi, tol, 0u32)];
    let mut total = 0.0;
    while let Some((x0, x1, t, depth)) = stack.pop() {
        let (v, err) = gk15(&mut f, x0, x1);
        if err <= t || depth >= 40 || (x1 - x0) < 1e-12 * (hi - lo) {
            total += v;
        } else {
            let m = 0.5 * (x0 + x1);
            stack.push((x0, m, 0.5 * t, depth + 1));
            stack.push((m, x1, 0.5 * t, depth + 1));
        }
    }
    sign * total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1e-14);
        let want = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn gaussian_matches_erf() {
        let v = integrate(|x| (-x * x).exp(), 0.0, 1.5, 1e-13);
        let want = 0.5 * std::f64::consts::PI.sqrt() * libm::erf(1.5);
        assert!((v - want).abs() < 1e-12);
        assert!((integrate(|x| x, 1.0, 0.0, 1e-12) + 0.5).abs() < 1e-15);
    }
}
