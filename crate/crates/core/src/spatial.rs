//! Uniform-grid spatial index over points in a cubic box. Used for
//! fixed-radius neighbor queries and nearest-neighbor searches without the
//! O(N²) scan.

pub struct UniformGrid {
    cell_size: f64,
    dims: usize,
    cells: Vec<Vec<u32>>,
    points: Vec<[f64; 3]>,
}

impl UniformGrid {
    /// Builds a grid over points that all lie inside `[0, box_edge]³`.
    /// `target_cell` sets the requested cell edge; it is clamped so the grid
    /// has at least one and at most 64³ cells.
    pub fn build(points: &[[f64; 3]], box_edge: f64, target_cell: f64) -> Self {
        let dims = if target_cell > 0.0 {
            (box_edge / target_cell).ceil() as usize
        } else {
            1
        }
        .clamp(1, 64);
        let cell_size = box_edge / dims as f64;
        let mut cells = vec![Vec::new(); dims * dims * dims];
        for (i, p) in points.iter().enumerate() {
            cells[Self::cell_index(p, cell_size, dims)].push(i as u32);
        }
        UniformGrid {
            cell_size,
            dims,
            cells,
            points: points.to_vec(),
        }
    }

    fn coord(x: f64, cell_size: f64, dims: usize) -> usize {
        ((x / cell_size) as usize).min(dims - 1)
    }

    fn cell_index(p: &[f64; 3], cell_size: f64, dims: usize) -> usize {
        let cx = Self::coord(p[0], cell_size, dims);
        let cy = Self::coord(p[1], cell_size, dims);
        let cz = Self::coord(p[2], cell_size, dims);
        (cx * dims + cy) * dims + cz
    }

    /// Indices of all points within `radius` of `center` (excluding none);
    /// results are in deterministic grid order.
    pub fn within_radius(&self, center: [f64; 3], radius: f64) -> Vec<u32> {
        let mut out = Vec::new();
        let r2 = radius * radius;
        let reach = (radius / self.cell_size).ceil() as isize;
        let cx = Self::coord(center[0], self.cell_size, self.dims) as isize;
        let cy = Self::coord(center[1], self.cell_size, self.dims) as isize;
        let cz = Self::coord(center[2], self.cell_size, self.dims) as isize;
        let dims = self.dims as isize;
        for ix in (cx - reach).max(0)..=(cx + reach).min(dims - 1) {
            for iy in (cy - reach).max(0)..=(cy + reach).min(dims - 1) {
                for iz in (cz - reach).max(0)..=(cz + reach).min(dims - 1) {
                    let cell = &self.cells[((ix * dims + iy) * dims + iz) as usize];
                    for &i in cell {
                        if dist2(self.points[i as usize], center) <= r2 {
                            out.push(i);
                        }
                    }
                }
            }
        }
        out
    }

    /// Distance from point `i` to its nearest other point, by expanding-shell
    /// search. Returns `None` for a single-point set.
    pub fn nearest_neighbor_distance(&self, i: usize) -> Option<f64> {
        if self.points.len() < 2 {
            return None;
        }
        let p = self.points[i];
        let dims = self.dims as isize;
        let cx = Self::coord(p[0], self.cell_size, self.dims) as isize;
        let cy = Self::coord(p[1], self.cell_size, self.dims) as isize;
        let cz = Self::coord(p[2], self.cell_size, self.dims) as isize;
        let mut best2 = f64::INFINITY;
        for shell in 0..self.dims as isize {
            for ix in (cx - shell).max(0)..=(cx + shell).min(dims - 1) {
                for iy in (cy - shell).max(0)..=(cy + shell).min(dims - 1) {
                    for iz in (cz - shell).max(0)..=(cz + shell).min(dims - 1) {
                        let cheb = (ix - cx).abs().max((iy - cy).abs()).max((iz - cz).abs());
                        if cheb != shell {
                            continue; // only the new ring
                        }
                        for &j in &self.cells[((ix * dims + iy) * dims + iz) as usize] {
                            if j as usize != i {
                                best2 = best2.min(dist2(self.points[j as usize], p));
                            }
                        }
                    }
                }
            }
            // Unscanned cells lie at Chebyshev ring > shell, hence at
            // distance ≥ shell·cell from the query point.
            let guaranteed = shell as f64 * self.cell_size;
            if best2 <= guaranteed * guaranteed {
                break;
            }
        }
        best2.is_finite().then(|| best2.sqrt())
    }
}

pub fn dist2(a: [f64; 3], b: [f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

pub fn displacement(from: [f64; 3], to: [f64; 3]) -> [f64; 3] {
    [to[0] - from[0], to[1] - from[1], to[2] - from[2]]
}
