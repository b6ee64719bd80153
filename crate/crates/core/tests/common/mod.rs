//! Test-only reference routines that do not share code with the solvers.

#![allow(clippy::excessive_precision, dead_code)]

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1] (QUADPACK qk15).
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod estimate, |Kronrod - Gauss|, and the Kronrod rule applied to |f|.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut absolute = fc.abs() * WGK[7];
    for k in 0..7 {
        let dx = half * XGK[k];
        let (lo, hi) = (f(center - dx), f(center + dx));
        kronrod += WGK[k] * (lo + hi);
        absolute += WGK[k] * (lo.abs() + hi.abs());
        if k % 2 == 1 {
            gauss += WG[k / 2] * (lo + hi);
        }
    }
    (
        kronrod * half,
        ((kronrod - gauss) * half).abs(),
        absolute * half.abs(),
    )
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let (left, el, abs_left) = gk15(f, a, mid);
    let (right, er, abs_right) = gk15(f, mid, b);
    let refined = left + right;
    // Below this the estimate is rounding noise and cannot shrink further.
    let floor = tol.max(50.0 * f64::EPSILON * (abs_left + abs_right));
    if depth == 0 || (el + er <= floor && (refined - whole).abs() <= 10.0 * floor) {
        return refined;
    }
    adapt(f, a, mid, left, 0.5 * tol, depth - 1) + adapt(f, mid, b, right, 0.5 * tol, depth - 1)
}

/// Adaptive bisection on a G7/K15 pair until the absolute error estimate is below `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (whole, _, _) = gk15(&f, a, b);
    adapt(&f, a, b, whole, tol, 50)
}

/// Si(x) by quadrature of sin(t)/t, split into unit-length panels so the oscillation stays resolved.
pub fn sine_integral_quadrature(x: f64) -> f64 {
    let sinc = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
    let span = x.abs();
    let panels = span.ceil().max(1.0) as usize;
    let width = span / panels as f64;
    let total: f64 = (0..panels)
        .map(|p| {
            let lo = p as f64 * width;
            integrate(sinc, lo, lo + width, 1e-17)
        })
        .sum();
    total.copysign(x)
}

pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    let step = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                b
            } else {
                a + step * i as f64
            }
        })
        .collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn kronrod_rule_is_exact_for_low_degree_polynomials() {
    for deg in 0..=20 {
        let (val, _, _) = gk15(&|x: f64| x.powi(deg), 0.0, 1.0);
        let expected = 1.0 / (deg as f64 + 1.0);
        assert!((val - expected).abs() < 1e-15, "degree {deg}: {val}");
    }
}

#[test]
fn quadrature_sine_integral_at_pi() {
    let si_pi = sine_integral_quadrature(std::f64::consts::PI);
    assert!((si_pi - 1.851_937_051_982_466).abs() < 1e-15, "{si_pi}");
}
