//! One-dimensional quadrature: adaptive Gauss–Kronrod (G7/K15) panels and a
//! compensated accumulator. Panel subdivision keys off the embedded G7
//! estimate, so smooth integrands converge in a handful of panels while
//! piecewise-polynomial ones (level-set volumes of piecewise-linear
//! exponents) get refined near their kinks.

/// Kahan–Babuška compensated sum; summation order is fixed by the caller,
/// which keeps multi-shard accumulation deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

// QUADPACK G7/K15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, usize) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let fv = f(mid - dx) + f(mid + dx);
        kronrod += WGK[i] * fv;
        if i % 2 == 1 {
            gauss += WG[i / 2] * fv;
        }
    }
    kronrod *= half;
    gauss *= half;
    let err = (kronrod - gauss).abs();
    // QUADPACK-style sharpening of the raw difference
    let err = if err > 0.0 {
        (200.0 * err).powf(1.5).min(err)
    } else {
        err
    };
    (kronrod, err, 15)
}

/// Adaptive integration of `f` on `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> QuadResult {
    struct Panel {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }
    let (v0, e0, n0) = gk15(&mut f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value: v0,
        error: e0,
    }];
    let mut evals = n0;
    let max_panels = 4000;

    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let bound = abs_tol.max(rel_tol * total.abs());
        if err <= bound || panels.len() >= max_panels {
            let mut acc = KahanSum::default();
            for p in &panels {
                acc.add(p.value);
            }
            return QuadResult {
                value: acc.value(),
                error: err,
                evals,
            };
        }
        // split the worst panel
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels[idx];
        let mid = 0.5 * (pa + pb);
        let (v1, e1, n1) = gk15(&mut f, pa, mid);
        let (v2, e2, n2) = gk15(&mut f, mid, pb);
        evals += n1 + n2;
        panels[idx] = Panel {
            a: pa,
            b: mid,
            value: v1,
            error: e1,
        };
        panels.push(Panel {
            a: mid,
            b: pb,
            value: v2,
            error: e2,
        });
    }
}

/// Fixed composite K15 grid on `[a, b]` split into `panels` equal panels.
/// Returns `(node, weight)` pairs in ascending node order; used where many
/// integrands share the same abscissae (per-direction projection integrals).
pub fn fixed_grid(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let mut grid = Vec::with_capacity(panels * 15);
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let pa = a + p as f64 * width;
        let mid = pa + 0.5 * width;
        let half = 0.5 * width;
        let mut nodes: Vec<(f64, f64)> = Vec::with_capacity(15);
        for i in 0..7 {
            let dx = half * XGK[i];
            nodes.push((mid - dx, WGK[i] * half));
            nodes.push((mid + dx, WGK[i] * half));
        }
        nodes.push((mid, WGK[7] * half));
        nodes.sort_by(|x, y| x.0.total_cmp(&y.0));
        grid.extend(nodes);
    }
    grid
}
