use super::NumericsError;

const MAX_ITERATIONS: usize = 500;

/// Outcome of a one-dimensional solve.
///
/// For root finding `residual` is the function value at `abscissa`; for
/// minimization it is the half-width of the final bracket. `converged` means
/// `|residual| <= tol` or `bracket_width <= tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverResult {
    pub abscissa: f64,
    pub residual: f64,
    pub bracket_width: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Brent's method: inverse quadratic interpolation and secant steps,
/// falling back to bisection whenever they stop shrinking the bracket.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<SolverResult, NumericsError> {
    if !(tol > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::InvalidInput("root finding needs finite bounds and tol > 0"));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(SolverResult {
            abscissa: a,
            residual: 0.0,
            bracket_width: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if fb == 0.0 {
        return Ok(SolverResult {
            abscissa: b,
            residual: 0.0,
            bracket_width: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(NumericsError::NoBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_ITERATIONS {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol {
            return Ok(SolverResult {
                abscissa: b,
                residual: fb,
                bracket_width: (c - b).abs(),
                iterations: iter,
                converged: true,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(NumericsError::InvalidInput("function returned NaN inside the bracket"));
        }
    }
    Err(NumericsError::NotConverged {
        lo: b.min(c),
        hi: b.max(c),
        iterations: MAX_ITERATIONS,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimizer of a unimodal function.
pub fn minimize_unimodal<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<SolverResult, NumericsError> {
    if !(tol > 0.0) || !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::InvalidInput("minimization needs finite lo < hi and tol > 0"));
    }
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut iterations = 0;
    loop {
        let width = b - a;
        let resolution = 4.0 * f64::EPSILON * a.abs().max(b.abs());
        if width <= tol || width <= resolution {
            break;
        }
        if iterations >= MAX_ITERATIONS {
            return Err(NumericsError::NotConverged { lo: a, hi: b, iterations });
        }
        iterations += 1;
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let (abscissa, _) = [(a, f64::INFINITY), (x1, f1), (x2, f2), (b, f64::INFINITY)]
        .into_iter()
        .filter(|&(x, _)| x >= a && x <= b)
        .fold((0.5 * (a + b), f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best });
    Ok(SolverResult {
        abscissa,
        residual: 0.5 * (b - a),
        bracket_width: b - a,
        iterations,
        converged: true,
    })
}
