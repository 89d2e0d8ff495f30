use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Scalar> Rect<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn unit() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::one())
    }

    pub fn width(&self) -> T {
        self.x1 - self.x0
    }

    pub fn height(&self) -> T {
        self.y1 - self.y0
    }

    pub fn area(&self) -> T {
        self.width() * self.height()
    }

    fn is_degenerate(&self) -> bool {
        let all_finite = [self.x0, self.x1, self.y0, self.y1]
            .iter()
            .all(|v| v.is_finite());
        !all_finite || !(self.width() > T::zero()) || !(self.height() > T::zero())
    }
}

/// Uniform triangulation of a rectangle with P1 geometry precomputed.
///
/// Each of the `nx·ny` cells is cut by one diagonal whose direction
/// alternates in a checkerboard pattern, so the mesh is invariant under the
/// reflections `x ↦ x0 + x1 − x` and `y ↦ y0 + y1 − y` whenever `nx` and
/// `ny` are even.
#[derive(Debug, Clone)]
pub struct Mesh<T> {
    rect: Rect<T>,
    nx: usize,
    ny: usize,
    vertices: Vec<[T; 2]>,
    triangles: Vec<[usize; 3]>,
    interior_mask: Vec<bool>,
    interior: Vec<usize>,
    interior_index: Vec<Option<usize>>,
    areas: Vec<T>,
    basis_gradients: Vec<[[T; 2]; 3]>,
}

impl<T: Scalar> Mesh<T> {
    /// Builds the criss-cross triangulation with `2·nx·ny` triangles.
    pub fn build(rect: Rect<T>, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(invalid(format!(
                "mesh needs at least 2 subdivisions per axis, got {nx}×{ny}"
            )));
        }
        if rect.is_degenerate() {
            return Err(invalid("degenerate rectangle"));
        }

        let hx = rect.width() / T::lit(nx as f64);
        let hy = rect.height() / T::lit(ny as f64);
        let idx = |i: usize, j: usize| j * (nx + 1) + i;

        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        let mut interior_mask = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                // Snap the last row/column onto the rectangle edge exactly.
                let x = if i == nx { rect.x1 } else { rect.x0 + hx * T::lit(i as f64) };
                let y = if j == ny { rect.y1 } else { rect.y0 + hy * T::lit(j as f64) };
                vertices.push([x, y]);
                interior_mask.push(i > 0 && i < nx && j > 0 && j < ny);
            }
        }

        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (v00, v10, v01, v11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
                if (i + j) % 2 == 0 {
                    triangles.push([v00, v10, v11]);
                    triangles.push([v00, v11, v01]);
                } else {
                    triangles.push([v00, v10, v01]);
                    triangles.push([v10, v11, v01]);
                }
            }
        }

        let mut interior = Vec::new();
        let mut interior_index = vec![None; vertices.len()];
        for (v, &inside) in interior_mask.iter().enumerate() {
            if inside {
                interior_index[v] = Some(interior.len());
                interior.push(v);
            }
        }

        let mut areas = Vec::with_capacity(triangles.len());
        let mut basis_gradients = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let [a, b, c] = tri.map(|v| vertices[v]);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if !(det > T::zero()) {
                return Err(Error::NumericDomain(format!(
                    "triangle {t} has non-positive orientation"
                )));
            }
            // ∇λ_k = rot90(opposite edge) / det
            let g = [
                [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
                [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
                [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
            ];
            areas.push(det / T::lit(2.0));
            basis_gradients.push(g);
        }

        Ok(Self {
            rect,
            nx,
            ny,
            vertices,
            triangles,
            interior_mask,
            interior,
            interior_index,
            areas,
            basis_gradients,
        })
    }

    pub fn unit_square(n: usize) -> Result<Self> {
        Self::build(Rect::unit(), n, n)
    }

    pub fn rect(&self) -> &Rect<T> {
        &self.rect
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// `true` for vertices off the Dirichlet boundary.
    pub fn interior_mask(&self) -> &[bool] {
        &self.interior_mask
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        !self.interior_mask[v]
    }

    /// Interior vertex ids in increasing order; defines the unknown numbering.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn interior_index(&self, v: usize) -> Option<usize> {
        self.interior_index[v]
    }

    pub fn num_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn areas(&self) -> &[T] {
        &self.areas
    }

    /// Constant gradients of the three barycentric coordinates of triangle `t`.
    pub fn basis_gradients(&self, t: usize) -> &[[T; 2]; 3] {
        &self.basis_gradients[t]
    }

    /// Sum of triangle areas, i.e. `|Ω|` up to rounding.
    pub fn measure(&self) -> T {
        self.areas.iter().copied().sum()
    }

    /// Vertex index `(i, j)` in the lattice.
    pub fn vertex_at(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    /// Mirror image of vertex `v` under `x ↦ x0 + x1 − x`.
    pub fn mirror_x(&self, v: usize) -> usize {
        let (i, j) = (v % (self.nx + 1), v / (self.nx + 1));
        self.vertex_at(self.nx - i, j)
    }

    /// Point with barycentric coordinates `bary` in triangle `t`.
    pub fn point_in(&self, t: usize, bary: [T; 3]) -> [T; 2] {
        let tri = self.triangles[t];
        let mut p = [T::zero(); 2];
        for k in 0..3 {
            let v = self.vertices[tri[k]];
            p[0] += bary[k] * v[0];
            p[1] += bary[k] * v[1];
        }
        p
    }

    /// Plain-text description for external plotting tools.
    ///
    /// ```text
    /// # mesh nx=<nx> ny=<ny> rect=<x0>,<x1>,<y0>,<y1>
    /// # vertices: index,x,y,boundary
    /// ...
    /// # triangles: index,a,b,c
    /// ...
    /// ```
    pub fn to_text(&self) -> String {
        let r = &self.rect;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# mesh nx={} ny={} rect={},{},{},{}",
            self.nx, self.ny, r.x0, r.x1, r.y0, r.y1
        );
        let _ = writeln!(s, "# vertices: index,x,y,boundary");
        for (v, p) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "{v},{},{},{}", p[0], p[1], u8::from(self.is_boundary(v)));
        }
        let _ = writeln!(s, "# triangles: index,a,b,c");
        for (t, tri) in self.triangles.iter().enumerate() {
            let _ = writeln!(s, "{t},{},{},{}", tri[0], tri[1], tri[2]);
        }
        s
    }

    /// Parses [`Mesh::to_text`] output, rebuilding the mesh from the header and
    /// checking the listed connectivity and boundary flags against it.
    pub fn from_text(text: &str) -> Result<Self> {
        let header = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# mesh "))
            .ok_or_else(|| invalid("missing mesh header"))?;
        let mut nx = None;
        let mut ny = None;
        let mut rect = None;
        for field in header.split_whitespace() {
            let (key, val) = field
                .split_once('=')
                .ok_or_else(|| invalid(format!("malformed header field {field:?}")))?;
            match key {
                "nx" => nx = val.parse::<usize>().ok(),
                "ny" => ny = val.parse::<usize>().ok(),
                "rect" => {
                    let parts: Vec<f64> = val.split(',').filter_map(|x| x.parse().ok()).collect();
                    if parts.len() == 4 {
                        rect = Some(Rect::new(
                            T::lit(parts[0]),
                            T::lit(parts[1]),
                            T::lit(parts[2]),
                            T::lit(parts[3]),
                        ));
                    }
                }
                _ => {}
            }
        }
        let (nx, ny, rect) = match (nx, ny, rect) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(invalid("incomplete mesh header")),
        };
        let mesh = Self::build(rect, nx, ny)?;

        let mut section = "";
        let (mut nv, mut nt) = (0usize, 0usize);
        for line in text.lines().skip(1) {
            if line.starts_with("# vertices") {
                section = "v";
                continue;
            }
            if line.starts_with("# triangles") {
                section = "t";
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            let bad = || invalid(format!("malformed mesh row {line:?}"));
            match section {
                "v" => {
                    let v: usize = cols.first().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
                    let flag = cols.get(3).and_then(|c| c.parse::<u8>().ok()).ok_or_else(bad)?;
                    if v >= mesh.num_vertices() || (flag == 1) != mesh.is_boundary(v) {
                        return Err(bad());
                    }
                    nv += 1;
                }
                "t" => {
                    let ids: Vec<usize> = cols.iter().filter_map(|c| c.parse().ok()).collect();
                    if ids.len() != 4 || ids[0] >= mesh.num_triangles() || mesh.triangles[ids[0]] != [ids[1], ids[2], ids[3]] {
                        return Err(bad());
                    }
                    nt += 1;
                }
                _ => return Err(bad()),
            }
        }
        if nv != mesh.num_vertices() || nt != mesh.num_triangles() {
            return Err(invalid("vertex or triangle count does not match header"));
        }
        Ok(mesh)
    }
}
