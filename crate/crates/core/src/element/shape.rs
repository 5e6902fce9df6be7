//! Biquadratic Lagrange (Q9) and serendipity (Q8) bases on `[-1, 1]^2`.
//!
//! Node order: corners counter-clockwise from `(-1, -1)`, then the mid-edge
//! nodes of edges 0-1, 1-2, 2-3, 3-0, then the center.

pub const NATURAL_NODES: [[f64; 2]; 9] = [
    [-1.0, -1.0],
    [1.0, -1.0],
    [1.0, 1.0],
    [-1.0, 1.0],
    [0.0, -1.0],
    [1.0, 0.0],
    [0.0, 1.0],
    [-1.0, 0.0],
    [0.0, 0.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Serendipity, used by cracked elements (center DOFs hold the openings).
    Q8,
    /// Full Lagrange, used by intact elements.
    Q9,
}

impl Basis {
    pub fn node_count(self) -> usize {
        match self {
            Basis::Q8 => 8,
            Basis::Q9 => 9,
        }
    }

    pub fn eval(self, xi: f64, eta: f64) -> ShapeEval {
        match self {
            Basis::Q8 => shape_q8(xi, eta),
            Basis::Q9 => shape_q9(xi, eta),
        }
    }
}

/// Shape values and natural-coordinate gradients. Entries past `len` are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEval {
    pub values: [f64; 9],
    pub grads: [[f64; 2]; 9],
    pub len: usize,
}

impl ShapeEval {
    pub fn values(&self) -> &[f64] {
        &self.values[..self.len]
    }

    pub fn grads(&self) -> &[[f64; 2]] {
        &self.grads[..self.len]
    }
}

// 1D quadratic Lagrange polynomials on nodes -1, 0, 1 and their derivatives.
fn lagrange_1d(s: f64, node: f64) -> (f64, f64) {
    if node < -0.5 {
        (0.5 * s * (s - 1.0), s - 0.5)
    } else if node > 0.5 {
        (0.5 * s * (s + 1.0), s + 0.5)
    } else {
        (1.0 - s * s, -2.0 * s)
    }
}

pub fn shape_q9(xi: f64, eta: f64) -> ShapeEval {
    let mut out = ShapeEval {
        values: [0.0; 9],
        grads: [[0.0; 2]; 9],
        len: 9,
    };
    for (i, node) in NATURAL_NODES.iter().enumerate() {
        let (lx, dlx) = lagrange_1d(xi, node[0]);
        let (ly, dly) = lagrange_1d(eta, node[1]);
        out.values[i] = lx * ly;
        out.grads[i] = [dlx * ly, lx * dly];
    }
    out
}

pub fn shape_q8(xi: f64, eta: f64) -> ShapeEval {
    let mut out = ShapeEval {
        values: [0.0; 9],
        grads: [[0.0; 2]; 9],
        len: 8,
    };
    for (i, node) in NATURAL_NODES.iter().take(8).enumerate() {
        let (xn, yn) = (node[0], node[1]);
        if i < 4 {
            let a = 1.0 + xi * xn;
            let b = 1.0 + eta * yn;
            let c = xi * xn + eta * yn - 1.0;
            out.values[i] = 0.25 * a * b * c;
            out.grads[i] = [0.25 * xn * b * (c + a), 0.25 * yn * a * (c + b)];
        } else if xn == 0.0 {
            let b = 1.0 + eta * yn;
            out.values[i] = 0.5 * (1.0 - xi * xi) * b;
            out.grads[i] = [-xi * b, 0.5 * (1.0 - xi * xi) * yn];
        } else {
            let a = 1.0 + xi * xn;
            out.values[i] = 0.5 * a * (1.0 - eta * eta);
            out.grads[i] = [0.5 * xn * (1.0 - eta * eta), -eta * a];
        }
    }
    out
}
