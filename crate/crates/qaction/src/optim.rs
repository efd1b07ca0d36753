//! Derivative-free minimization used by the fitter: a coordinate-descent
//! warm start, a Nelder-Mead simplex, and a parabolic polish pass that
//! drives the finite-difference gradient at the optimum toward zero.

/// Result of a minimization run.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub n_eval: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Simplex diameter tolerance.
    pub x_tol: f64,
    /// Function-value spread tolerance (absolute).
    pub f_tol: f64,
    /// Initial simplex edge length per coordinate.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { max_iter: 600, x_tol: 1e-11, f_tol: 1e-22, initial_step: 0.1 }
    }
}

/// Standard Nelder-Mead simplex (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> OptimResult {
    let n = x0.len();
    let mut n_eval = 0usize;
    let mut eval = |x: &[f64], n_eval: &mut usize| -> f64 {
        *n_eval += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut fv: Vec<f64> = simplex.iter().map(|v| eval(v, &mut n_eval)).collect();

    let mut converged = false;
    for _ in 0..opts.max_iter {
        // order ascending by function value
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| fv[a].partial_cmp(&fv[b]).unwrap());
        let ordered: Vec<Vec<f64>> = idx.iter().map(|&i| simplex[i].clone()).collect();
        let fo: Vec<f64> = idx.iter().map(|&i| fv[i]).collect();
        simplex = ordered;
        fv = fo;

        let diam = (1..=n)
            .map(|i| {
                simplex[i]
                    .iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max);
        if diam < opts.x_tol && (fv[n] - fv[0]).abs() < opts.f_tol.max(1e-15 * fv[0].abs()) {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0f64; n];
        for v in simplex.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let mirror = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst).map(|(c, w)| c + t * (c - w)).collect() };
        let xr = mirror(1.0);
        let fr = eval(&xr, &mut n_eval);
        if fr < fv[0] {
            let xe = mirror(2.0);
            let fe = eval(&xe, &mut n_eval);
            if fe < fr {
                simplex[n] = xe;
                fv[n] = fe;
            } else {
                simplex[n] = xr;
                fv[n] = fr;
            }
        } else if fr < fv[n - 1] {
            simplex[n] = xr;
            fv[n] = fr;
        } else {
            let (xc, fc) = if fr < fv[n] {
                let xc = mirror(0.5);
                let fc = eval(&xc, &mut n_eval);
                (xc, fc)
            } else {
                let xc: Vec<f64> = centroid.iter().zip(&worst).map(|(c, w)| c - 0.5 * (c - w)).collect();
                let fc = eval(&xc, &mut n_eval);
                (xc, fc)
            };
            if fc < fv[n].min(fr) {
                simplex[n] = xc;
                fv[n] = fc;
            } else {
                // shrink toward the best vertex
                for i in 1..=n {
                    let best = simplex[0].clone();
                    for (z, b) in simplex[i].iter_mut().zip(&best) {
                        *z = b + 0.5 * (*z - b);
                    }
                    fv[i] = eval(&simplex[i].clone(), &mut n_eval);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..=n {
        if fv[i] < fv[best] {
            best = i;
        }
    }
    OptimResult { x: simplex[best].clone(), fx: fv[best], n_eval, converged }
}

/// Coordinate-descent warm start: per coordinate, bracket by step doubling
/// and refine with golden-section search.
pub fn coordinate_descent<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    sweeps: usize,
    step0: f64,
) -> OptimResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut n_eval = 0usize;
    let mut eval = |x: &[f64], n_eval: &mut usize| -> f64 {
        *n_eval += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut fx = eval(&x, &mut n_eval);
    for sweep in 0..sweeps {
        let step = step0 / (4.0f64).powi(sweep as i32);
        for i in 0..n {
            let mut probe = |d: f64, n_eval: &mut usize| {
                let mut xt = x.clone();
                xt[i] += d;
                eval(&xt, n_eval)
            };
            let mut a = -step;
            let mut b = step;
            let (mut fa, mut fb) = (probe(a, &mut n_eval), probe(b, &mut n_eval));
            // walk downhill doubling the bracket, max 12 expansions
            for _ in 0..12 {
                if fx <= fa && fx <= fb {
                    break;
                }
                if fa < fb {
                    b = a;
                    fb = fa;
                    a *= 2.0;
                    fa = probe(a, &mut n_eval);
                } else {
                    a = b;
                    fa = fb;
                    b *= 2.0;
                    fb = probe(b, &mut n_eval);
                }
            }
            let (mut lo, mut hi) = (a.min(b), a.max(b));
            const PHI: f64 = 0.618_033_988_749_894_8;
            let mut c = hi - PHI * (hi - lo);
            let mut d = lo + PHI * (hi - lo);
            let (mut fc, mut fd) = (probe(c, &mut n_eval), probe(d, &mut n_eval));
            for _ in 0..40 {
                if (hi - lo).abs() < 1e-12 {
                    break;
                }
                if fc < fd {
                    hi = d;
                    d = c;
                    fd = fc;
                    c = hi - PHI * (hi - lo);
                    fc = probe(c, &mut n_eval);
                } else {
                    lo = c;
                    c = d;
                    fc = fd;
                    d = lo + PHI * (hi - lo);
                    fd = probe(d, &mut n_eval);
                }
            }
            let dbest = if fc < fd { c } else { d };
            let fbest = fc.min(fd);
            if fbest < fx {
                x[i] += dbest;
                fx = fbest;
            }
        }
    }
    OptimResult { x, fx, n_eval, converged: true }
}

/// Parabolic polish: per coordinate, fit a parabola through three points and
/// jump to its vertex when that lowers f; the probe step shrinks geometrically.
pub fn polish_parabolic<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], fx0: f64) -> OptimResult {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = fx0;
    let mut n_eval = 0usize;
    let mut eval = |x: &[f64], n_eval: &mut usize| -> f64 {
        *n_eval += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut h = 1e-4;
    for _round in 0..8 {
        for i in 0..n {
            let mut xp = x.clone();
            xp[i] += h;
            let fp = eval(&xp, &mut n_eval);
            let mut xm = x.clone();
            xm[i] -= h;
            let fm = eval(&xm, &mut n_eval);
            let denom = fp - 2.0 * fx + fm;
            if denom > 0.0 {
                let delta = -0.5 * h * (fp - fm) / denom;
                if delta.abs() < 8.0 * h {
                    let mut xv = x.clone();
                    xv[i] += delta;
                    let fv = eval(&xv, &mut n_eval);
                    if fv < fx {
                        x = xv;
                        fx = fv;
                        continue;
                    }
                }
            }
            if fp < fx {
                x = xp;
                fx = fp;
            } else if fm < fx {
                x = xm;
                fx = fm;
            }
        }
        h *= 0.25;
    }
    OptimResult { x, fx, n_eval, converged: true }
}

/// Central finite-difference gradient.
pub fn fd_gradient<F: FnMut(&[f64]) -> f64>(mut f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut xp = x.to_vec();
        xp[i] += h;
        let mut xm = x.to_vec();
        xm[i] -= h;
        g.push((f(&xp) - f(&xm)) / (2.0 * h));
    }
    g
}
