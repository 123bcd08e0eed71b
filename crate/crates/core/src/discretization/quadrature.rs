//! One-dimensional adaptive quadrature and scalar minimisation helpers.

/// Adaptive Simpson quadrature of `g` over `[a, b]`.
///
/// Refinement stops on a panel once the Richardson estimate falls below the
/// panel's share of `tol`, or at `max_depth` bisections.
pub fn adaptive_simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = g(a);
    let fb = g(b);
    let m = 0.5 * (a + b);
    let fm = g(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(g, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm);
    let frm = g(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Minimum of `g` on `[a, b]`: uniform scan with `samples` panels followed
/// by golden-section refinement around the best sample.
///
/// Returns `(argmin, min)`.
pub fn scan_golden_min<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, samples: usize) -> (f64, f64) {
    let n = samples.max(2);
    let step = (b - a) / n as f64;
    let mut best = (a, g(a));
    for i in 1..=n {
        let t = if i == n { b } else { a + step * i as f64 };
        let v = g(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let lo = (best.0 - step).max(a);
    let hi = (best.0 + step).min(b);
    let (t, v) = golden_section(g, lo, hi, 1e-13 * (1.0 + (b - a).abs()));
    if v < best.1 {
        (t, v)
    } else {
        best
    }
}

fn golden_section<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = g(c);
    let mut fd = g(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = g(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = g(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, g(t))
}

/// Unit-ball volume in dimension `dim`: π^{N/2} / Γ(N/2 + 1).
pub fn unit_ball_volume(dim: u32) -> f64 {
    let half = dim as f64 / 2.0;
    std::f64::consts::PI.powf(half) / libm::tgamma(half + 1.0)
}

/// Surface area of the unit sphere in ℝ^dim (dim ≥ 1): N·|B₁|.
pub fn unit_sphere_area(dim: u32) -> f64 {
    dim as f64 * unit_ball_volume(dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_integrates_smooth_functions() {
        let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, PI, 1e-13, 50);
        assert!((v - 2.0).abs() < 1e-12);
        let v = adaptive_simpson(&|x: f64| (-x).exp(), 0.0, 5.0, 1e-13, 50);
        assert!((v - (1.0 - (-5f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn golden_finds_interior_and_boundary_minima() {
        let (t, v) = scan_golden_min(&|x: f64| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 16);
        assert!((t - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
        let (t, v) = scan_golden_min(&|x: f64| x * x - 1.0, 0.0, 2.0, 16);
        assert_eq!(t, 0.0);
        assert_eq!(v, -1.0);
    }

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-14);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(1) - 2.0).abs() < 1e-14);
    }
}
