use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use super::{CompensatedSum, NumericsError};

/// Integration domain for [`integrate_2d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Rectangle {
        y_min: f64,
        y_max: f64,
        z_min: f64,
        z_max: f64,
    },
    /// Disc centred at the origin, integrated in polar coordinates.
    Disc { radius: f64 },
}

impl Region {
    pub fn centered_rectangle(half_y: f64, half_z: f64) -> Self {
        Region::Rectangle {
            y_min: -half_y,
            y_max: half_y,
            z_min: -half_z,
            z_max: half_z,
        }
    }

    pub fn disc(radius: f64) -> Self {
        Region::Disc { radius }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Region::Rectangle {
                y_min,
                y_max,
                z_min,
                z_max,
            } => (y_max - y_min) * (z_max - z_min),
            Region::Disc { radius } => PI * radius * radius,
        }
    }

    fn is_degenerate(&self) -> bool {
        match *self {
            Region::Rectangle {
                y_min,
                y_max,
                z_min,
                z_max,
            } => !(y_max > y_min && z_max > z_min && (y_max - y_min).is_finite() && (z_max - z_min).is_finite()),
            Region::Disc { radius } => !(radius > 0.0 && radius.is_finite()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 0.0,
            max_panels: 200_000,
        }
    }
}

impl QuadratureOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), NumericsError> {
        if !(self.rel_tol > 0.0 || self.abs_tol > 0.0) || self.rel_tol < 0.0 || self.abs_tol < 0.0 {
            return Err(NumericsError::InvalidInput("tolerances must be nonnegative and not both zero"));
        }
        if self.max_panels == 0 {
            return Err(NumericsError::InvalidInput("max_panels must be at least 1"));
        }
        Ok(())
    }

    fn satisfied(&self, value: f64, error: f64) -> bool {
        error <= (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub panels_used: usize,
}

/// Panels are ordered by error; the sequence number breaks ties so that the
/// refinement order never depends on anything but the inputs.
#[derive(Debug, Clone, Copy)]
struct Panel<G> {
    geometry: G,
    value: f64,
    error: f64,
    seq: usize,
}

impl<G> PartialEq for Panel<G> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<G> Eq for Panel<G> {}

impl<G> PartialOrd for Panel<G> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<G> Ord for Panel<G> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Global adaptive driver shared by the 1-D and 2-D integrators: always
/// bisect the panel with the largest error estimate.
fn adaptive<G: Copy>(
    initial: Vec<(G, f64, f64)>,
    opts: &QuadratureOptions,
    mut split: impl FnMut(&G) -> [(G, f64, f64); 2],
) -> Result<QuadratureResult, NumericsError> {
    opts.validate()?;
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let mut value = CompensatedSum::new();
    let mut error = CompensatedSum::new();
    for (geometry, v, e) in initial {
        value.add(v);
        error.add(e);
        heap.push(Panel {
            geometry,
            value: v,
            error: e,
            seq,
        });
        seq += 1;
    }

    let finish = |heap: &BinaryHeap<Panel<G>>| {
        let mut ordered: Vec<&Panel<G>> = heap.iter().collect();
        ordered.sort_by_key(|p| p.seq);
        QuadratureResult {
            value: ordered.iter().map(|p| p.value).collect::<CompensatedSum>().value(),
            error_estimate: ordered.iter().map(|p| p.error).collect::<CompensatedSum>().value(),
            panels_used: heap.len(),
        }
    };

    loop {
        if opts.satisfied(value.value(), error.value()) {
            let result = finish(&heap);
            if opts.satisfied(result.value, result.error_estimate) {
                return Ok(result);
            }
        }
        if heap.len() >= opts.max_panels {
            return Err(NumericsError::MaxPanels { best: finish(&heap) });
        }
        let worst = heap.pop().expect("at least one panel");
        if worst.error == 0.0 {
            // Nothing left to refine anywhere.
            heap.push(worst);
            return Ok(finish(&heap));
        }
        value.add(-worst.value);
        error.add(-worst.error);
        for (geometry, v, e) in split(&worst.geometry) {
            value.add(v);
            error.add(e);
            heap.push(Panel {
                geometry,
                value: v,
                error: e,
                seq,
            });
            seq += 1;
        }
        if !value.value().is_finite() {
            return Err(NumericsError::InvalidInput("integrand produced a non-finite value"));
        }
    }
}

// Genz-Malik degree-7 rule with an embedded degree-5 rule, specialised to two
// dimensions. Weights are normalised to the box volume.
const GM_L2: f64 = 0.358_568_582_800_318_1; // sqrt(9/70)
const GM_L3: f64 = 0.948_683_298_050_513_8; // sqrt(9/10)
const GM_L5: f64 = 0.688_247_201_611_685_3; // sqrt(9/19)
const GM_W: [f64; 5] = [
    -3816.0 / 19683.0,
    980.0 / 6561.0,
    1020.0 / 19683.0,
    200.0 / 19683.0,
    6859.0 / 19683.0 / 4.0,
];
const GM_W5: [f64; 4] = [-971.0 / 729.0, 245.0 / 486.0, 65.0 / 1458.0, 25.0 / 729.0];

#[derive(Debug, Clone, Copy)]
struct Box2 {
    center: [f64; 2],
    half: [f64; 2],
    split_axis: usize,
}

fn genz_malik<F: Fn(f64, f64) -> f64>(f: &F, center: [f64; 2], half: [f64; 2]) -> (Box2, f64, f64) {
    let [cy, cz] = center;
    let [hy, hz] = half;
    let volume = 4.0 * hy * hz;
    let f1 = f(cy, cz);

    let mut f2 = 0.0;
    let mut f3 = 0.0;
    let mut divdiff = [0.0; 2];
    for (axis, dd) in divdiff.iter_mut().enumerate() {
        let (dy2, dz2, dy3, dz3) = if axis == 0 {
            (GM_L2 * hy, 0.0, GM_L3 * hy, 0.0)
        } else {
            (0.0, GM_L2 * hz, 0.0, GM_L3 * hz)
        };
        let f2i = f(cy + dy2, cz + dz2) + f(cy - dy2, cz - dz2);
        let f3i = f(cy + dy3, cz + dz3) + f(cy - dy3, cz - dz3);
        f2 += f2i;
        f3 += f3i;
        *dd = (f3i + 12.0 * f1 - 7.0 * f2i).abs();
    }

    let (ay, az) = (GM_L3 * hy, GM_L3 * hz);
    let f4 = f(cy + ay, cz + az) + f(cy + ay, cz - az) + f(cy - ay, cz + az) + f(cy - ay, cz - az);
    let (by, bz) = (GM_L5 * hy, GM_L5 * hz);
    let f5 = f(cy + by, cz + bz) + f(cy + by, cz - bz) + f(cy - by, cz + bz) + f(cy - by, cz - bz);

    let high = volume * (GM_W[0] * f1 + GM_W[1] * f2 + GM_W[2] * f3 + GM_W[3] * f4 + GM_W[4] * f5);
    let low = volume * (GM_W5[0] * f1 + GM_W5[1] * f2 + GM_W5[2] * f3 + GM_W5[3] * f4);

    // Split along the axis with the largest fourth difference; near-ties go
    // to the wider side.
    let split_axis = if (divdiff[0] - divdiff[1]).abs() <= 1e-12 * divdiff[0].max(divdiff[1]) {
        if hy >= hz {
            0
        } else {
            1
        }
    } else if divdiff[0] > divdiff[1] {
        0
    } else {
        1
    };
    (
        Box2 {
            center,
            half,
            split_axis,
        },
        high,
        (high - low).abs(),
    )
}

const INITIAL_GRID: usize = 4;

fn integrate_box<F: Fn(f64, f64) -> f64>(
    f: &F,
    y: (f64, f64),
    z: (f64, f64),
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, NumericsError> {
    // A uniform starting grid keeps a single coarse panel from missing a
    // narrow peak entirely.
    let half = [0.5 * (y.1 - y.0) / INITIAL_GRID as f64, 0.5 * (z.1 - z.0) / INITIAL_GRID as f64];
    let mut initial = Vec::with_capacity(INITIAL_GRID * INITIAL_GRID);
    for i in 0..INITIAL_GRID {
        for j in 0..INITIAL_GRID {
            let center = [
                y.0 + (2 * i + 1) as f64 * half[0],
                z.0 + (2 * j + 1) as f64 * half[1],
            ];
            initial.push(genz_malik(f, center, half));
        }
    }
    adaptive(initial, opts, |b| {
        let axis = b.split_axis;
        let mut half = b.half;
        half[axis] *= 0.5;
        let mut lo = b.center;
        let mut hi = b.center;
        lo[axis] -= half[axis];
        hi[axis] += half[axis];
        [genz_malik(f, lo, half), genz_malik(f, hi, half)]
    })
}

/// Adaptive cubature of `f(y, z)` over a rectangle or a centred disc.
///
/// Rectangles use a globally adaptive Genz-Malik 7/5 rule; discs are mapped
/// to polar coordinates first so the boundary is resolved exactly.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    region: Region,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, NumericsError> {
    if region.is_degenerate() {
        return Err(NumericsError::InvalidInput("degenerate integration region"));
    }
    match region {
        Region::Rectangle {
            y_min,
            y_max,
            z_min,
            z_max,
        } => integrate_box(&f, (y_min, y_max), (z_min, z_max), opts),
        Region::Disc { radius } => {
            let polar = |r: f64, t: f64| {
                let (s, c) = t.sin_cos();
                r * f(r * c, r * s)
            };
            integrate_box(&polar, (0.0, radius), (0.0, 2.0 * PI), opts)
        }
    }
}

// 15-point Kronrod rule with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> ((f64, f64), f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    ((a, b), kronrod, (kronrod - gauss).abs())
}

/// Adaptive Gauss-Kronrod integration over consecutive pieces
/// `[edges[0], edges[1]], [edges[1], edges[2]], ...`.
///
/// Putting known kinks or near-singular points on piece edges keeps the
/// integrand off the quadrature nodes there.
pub fn integrate_1d_pieces<F: Fn(f64) -> f64>(
    f: F,
    edges: &[f64],
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, NumericsError> {
    if edges.len() < 2 {
        return Err(NumericsError::InvalidInput("need at least two interval edges"));
    }
    if edges.windows(2).any(|w| !(w[1] >= w[0]) || !w[0].is_finite() || !w[1].is_finite()) {
        return Err(NumericsError::InvalidInput("interval edges must be finite and nondecreasing"));
    }
    let initial: Vec<_> = edges
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod15(&f, w[0], w[1]))
        .collect();
    if initial.is_empty() {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            panels_used: 0,
        });
    }
    adaptive(initial, opts, |&(a, b)| {
        let mid = 0.5 * (a + b);
        [kronrod15(&f, a, mid), kronrod15(&f, mid, b)]
    })
}

pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<QuadratureResult, NumericsError> {
    if a <= b {
        integrate_1d_pieces(f, &[a, b], opts)
    } else {
        integrate_1d_pieces(f, &[b, a], opts).map(|r| QuadratureResult {
            value: -r.value,
            ..r
        })
    }
}
