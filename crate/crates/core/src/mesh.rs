//! Single-patch NURBS surface meshes and their plain-text file format.

use crate::error::{Error, Result};
use crate::spline::{build_extraction, insert_knot, ElementSpline, ExtractionOperator, KnotVector};
use crate::tensor::Vec3;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    XiMin,
    XiMax,
    EtaMin,
    EtaMax,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::XiMin, Side::XiMax, Side::EtaMin, Side::EtaMax];

    pub fn name(self) -> &'static str {
        match self {
            Side::XiMin => "xi_min",
            Side::XiMax => "xi_max",
            Side::EtaMin => "eta_min",
            Side::EtaMax => "eta_max",
        }
    }

    pub fn parse(s: &str) -> Option<Side> {
        Side::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Parametric direction held constant along the side.
    pub fn fixed_dir(self) -> usize {
        match self {
            Side::XiMin | Side::XiMax => 0,
            Side::EtaMin | Side::EtaMax => 1,
        }
    }

    pub fn outward_sign(self) -> f64 {
        match self {
            Side::XiMin | Side::EtaMin => -1.0,
            Side::XiMax | Side::EtaMax => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub id: usize,
    /// Element coordinates (i, j) in the grid of nonempty spans.
    pub grid: [usize; 2],
    /// Parametric box [ξ_a, ξ_b] × [η_a, η_b].
    pub param: [(f64, f64); 2],
    /// Global control-point ids, ξ-fastest.
    pub conn: Vec<usize>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchMesh {
    pub knots: [KnotVector; 2],
    pub control: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub elements: Vec<Element>,
    pub tags: BTreeMap<String, Vec<Side>>,
    extraction: [Vec<ExtractionOperator>; 2],
    n_grid: [usize; 2],
}

impl PatchMesh {
    pub fn new(
        knots: [KnotVector; 2],
        control: Vec<Vec3>,
        weights: Vec<f64>,
        tags: BTreeMap<String, Vec<Side>>,
    ) -> Result<Self> {
        let n = [knots[0].n_basis(), knots[1].n_basis()];
        if control.len() != n[0] * n[1] || weights.len() != control.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} control points and weights, got {} and {}",
                n[0] * n[1],
                control.len(),
                weights.len()
            )));
        }
        if let Some((index, &weight)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0)) {
            return Err(Error::InvalidWeight { index, weight });
        }
        let extraction = [build_extraction(&knots[0])?, build_extraction(&knots[1])?];
        let spans = [knots[0].spans(), knots[1].spans()];
        let (p, q) = (knots[0].degree(), knots[1].degree());
        let mut elements = Vec::with_capacity(spans[0].len() * spans[1].len());
        for (je, &(sj, e0, e1)) in spans[1].iter().enumerate() {
            for (ie, &(si, x0, x1)) in spans[0].iter().enumerate() {
                let mut conn = Vec::with_capacity((p + 1) * (q + 1));
                for j in sj - q..=sj {
                    for i in si - p..=si {
                        conn.push(i + n[0] * j);
                    }
                }
                let w = conn.iter().map(|&c| weights[c]).collect();
                elements.push(Element {
                    id: elements.len(),
                    grid: [ie, je],
                    param: [(x0, x1), (e0, e1)],
                    conn,
                    weights: w,
                });
            }
        }
        let n_grid = [spans[0].len(), spans[1].len()];
        Ok(PatchMesh { knots, control, weights, elements, tags, extraction, n_grid })
    }

    /// Flat rectangle [0, lx] × [0, ly] in the x-y plane, identity parametrisation.
    pub fn flat_rectangle(lx: f64, ly: f64, degrees: [usize; 2], n_el: [usize; 2]) -> Result<Self> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::InvalidParameter("rectangle side lengths must be positive".into()));
        }
        let kx = KnotVector::uniform(degrees[0], n_el[0])?;
        let ky = KnotVector::uniform(degrees[1], n_el[1])?;
        let (gx, gy) = (kx.greville(), ky.greville());
        let mut control = Vec::with_capacity(gx.len() * gy.len());
        for y in &gy {
            for x in &gx {
                control.push(Vec3::new(lx * x, ly * y, 0.0));
            }
        }
        let weights = vec![1.0; control.len()];
        PatchMesh::new([kx, ky], control, weights, default_tags())
    }

    /// Cylindrical roof segment: axis along x, length `length`, radius `radius`,
    /// opening angle ±`half_angle` about the z axis; exact quadratic conic in η.
    pub fn cylinder_roof(radius: f64, length: f64, half_angle: f64, n_el: [usize; 2]) -> Result<Self> {
        if !(radius > 0.0 && length > 0.0 && half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter("invalid cylinder dimensions".into()));
        }
        let (s, c) = half_angle.sin_cos();
        // homogeneous arc control points in the y-z plane
        let arc = [[-radius * s, radius * c, 0.0, 1.0], [0.0, radius / c, 0.0, 1.0], [radius * s, radius * c, 0.0, 1.0]];
        let mut pw: Vec<[f64; 4]> = arc.iter().enumerate().map(|(i, p)| {
            let w = if i == 1 { c } else { 1.0 };
            [p[0] * w, p[1] * w, 0.0, w]
        }).collect();
        let mut ky = KnotVector::uniform(2, 1)?;
        for k in 1..n_el[1] {
            let (kk, pp) = insert_knot(&ky, &pw, k as f64 / n_el[1] as f64)?;
            ky = kk;
            pw = pp;
        }
        let kx = KnotVector::uniform(2, n_el[0])?;
        let gx = kx.greville();
        let mut control = Vec::with_capacity(gx.len() * pw.len());
        let mut weights = Vec::with_capacity(control.capacity());
        for h in &pw {
            for x in &gx {
                control.push(Vec3::new(length * x, h[0] / h[3], h[1] / h[3]));
                weights.push(h[3]);
            }
        }
        PatchMesh::new([kx, ky], control, weights, default_tags())
    }

    pub fn n_control(&self) -> [usize; 2] {
        [self.knots[0].n_basis(), self.knots[1].n_basis()]
    }

    pub fn n_grid(&self) -> [usize; 2] {
        self.n_grid
    }

    pub fn degrees(&self) -> [usize; 2] {
        [self.knots[0].degree(), self.knots[1].degree()]
    }

    pub fn element_spline(&self, e: usize) -> ElementSpline<'_> {
        let el = &self.elements[e];
        ElementSpline {
            ext: [&self.extraction[0][el.grid[0]], &self.extraction[1][el.grid[1]]],
            degrees: self.degrees(),
            spans: el.param,
            weights: &el.weights,
        }
    }

    /// Elements touching a side of the patch.
    pub fn side_elements(&self, side: Side) -> Vec<usize> {
        let [nx, ny] = self.n_grid;
        self.elements
            .iter()
            .filter(|el| match side {
                Side::XiMin => el.grid[0] == 0,
                Side::XiMax => el.grid[0] + 1 == nx,
                Side::EtaMin => el.grid[1] == 0,
                Side::EtaMax => el.grid[1] + 1 == ny,
            })
            .map(|el| el.id)
            .collect()
    }

    /// Control points on a side (the boundary row of the control net).
    pub fn side_controls(&self, side: Side) -> Vec<usize> {
        let [nx, ny] = self.n_control();
        match side {
            Side::XiMin => (0..ny).map(|j| j * nx).collect(),
            Side::XiMax => (0..ny).map(|j| nx - 1 + j * nx).collect(),
            Side::EtaMin => (0..nx).collect(),
            Side::EtaMax => (0..nx).map(|i| i + (ny - 1) * nx).collect(),
        }
    }

    /// Sides carrying a tag; side names themselves are always valid tags.
    pub fn sides_for(&self, tag: &str) -> Option<Vec<Side>> {
        Side::parse(tag).map(|s| vec![s]).or_else(|| self.tags.get(tag).cloned())
    }

    /// Element containing the parametric point and the point itself.
    pub fn locate(&self, xi: f64, eta: f64) -> Option<usize> {
        self.elements
            .iter()
            .find(|el| {
                xi >= el.param[0].0 && xi <= el.param[0].1 && eta >= el.param[1].0 && eta <= el.param[1].1
            })
            .map(|el| el.id)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let [p, q] = self.degrees();
        let _ = writeln!(s, "viscoshell-mesh 1");
        let _ = writeln!(s, "degrees {p} {q}");
        for (name, kv) in [("knots_xi", &self.knots[0]), ("knots_eta", &self.knots[1])] {
            let _ = write!(s, "{name} {}", kv.knots().len());
            for k in kv.knots() {
                let _ = write!(s, " {k:?}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "controls {}", self.control.len());
        for (x, w) in self.control.iter().zip(&self.weights) {
            let _ = writeln!(s, "{:?} {:?} {:?} {:?}", x.x, x.y, x.z, w);
        }
        let _ = writeln!(s, "elements {}", self.elements.len());
        for el in &self.elements {
            let _ = write!(s, "{} {}", el.grid[0], el.grid[1]);
            for c in &el.conn {
                let _ = write!(s, " {c}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "tags {}", self.tags.len());
        for (name, sides) in &self.tags {
            let _ = write!(s, "{name}");
            for side in sides {
                let _ = write!(s, " {}", side.name());
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
            let (i, l) = lines.next().ok_or(Error::MeshFormat { line: 0, message: format!("missing {what}") })?;
            Ok((i + 1, l.split_whitespace().collect()))
        };
        let err = |line: usize, m: &str| Error::MeshFormat { line, message: m.to_string() };
        let num = |line: usize, s: &str| -> Result<f64> { s.parse::<f64>().map_err(|_| err(line, &format!("bad number `{s}`"))) };
        let int = |line: usize, s: &str| -> Result<usize> { s.parse::<usize>().map_err(|_| err(line, &format!("bad integer `{s}`"))) };

        let (l, h) = next("header")?;
        if h != ["viscoshell-mesh", "1"] {
            return Err(err(l, "unrecognised header"));
        }
        let (l, d) = next("degrees")?;
        if d.len() != 3 || d[0] != "degrees" {
            return Err(err(l, "expected `degrees p q`"));
        }
        let deg = [int(l, d[1])?, int(l, d[2])?];
        let mut kvs = Vec::new();
        for (k, name) in ["knots_xi", "knots_eta"].iter().enumerate() {
            let (l, t) = next(name)?;
            if t.len() < 2 || t[0] != *name {
                return Err(err(l, &format!("expected `{name}`")));
            }
            let n = int(l, t[1])?;
            if t.len() != n + 2 {
                return Err(err(l, "knot count mismatch"));
            }
            let knots = t[2..].iter().map(|s| num(l, s)).collect::<Result<Vec<_>>>()?;
            kvs.push(KnotVector::new(knots, deg[k]).map_err(|e| err(l, &e.to_string()))?);
        }
        let (l, t) = next("controls")?;
        if t.len() != 2 || t[0] != "controls" {
            return Err(err(l, "expected `controls n`"));
        }
        let nc = int(l, t[1])?;
        let mut control = Vec::with_capacity(nc);
        let mut weights = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (l, t) = next("control point")?;
            if t.len() != 4 {
                return Err(err(l, "expected `x y z w`"));
            }
            control.push(Vec3::new(num(l, t[0])?, num(l, t[1])?, num(l, t[2])?));
            weights.push(num(l, t[3])?);
        }
        let (l, t) = next("elements")?;
        if t.len() != 2 || t[0] != "elements" {
            return Err(err(l, "expected `elements n`"));
        }
        let ne = int(l, t[1])?;
        let mut listed = Vec::with_capacity(ne);
        for _ in 0..ne {
            let (l, t) = next("element")?;
            let v = t.iter().map(|s| int(l, s)).collect::<Result<Vec<_>>>()?;
            listed.push((l, v));
        }
        let (l, t) = next("tags")?;
        if t.len() != 2 || t[0] != "tags" {
            return Err(err(l, "expected `tags n`"));
        }
        let nt = int(l, t[1])?;
        let mut tags = BTreeMap::new();
        for _ in 0..nt {
            let (l, t) = next("tag")?;
            if t.is_empty() {
                return Err(err(l, "empty tag line"));
            }
            let sides = t[1..].iter().map(|s| Side::parse(s).ok_or_else(|| err(l, &format!("unknown side `{s}`")))).collect::<Result<Vec<_>>>()?;
            tags.insert(t[0].to_string(), sides);
        }
        let [kx, ky]: [KnotVector; 2] = kvs.try_into().map_err(|_| err(0, "knot vectors"))?;
        let mesh = PatchMesh::new([kx, ky], control, weights, tags).map_err(|e| err(0, &e.to_string()))?;
        if listed.len() != mesh.elements.len() {
            return Err(err(0, "element count does not match the knot vectors"));
        }
        for ((l, v), el) in listed.iter().zip(&mesh.elements) {
            if v.len() < 2 || v[0] != el.grid[0] || v[1] != el.grid[1] || v[2..] != el.conn[..] {
                return Err(err(*l, "element connectivity inconsistent with the knot vectors"));
            }
        }
        Ok(mesh)
    }
}

fn default_tags() -> BTreeMap<String, Vec<Side>> {
    let mut t = BTreeMap::new();
    t.insert("left".to_string(), vec![Side::XiMin]);
    t.insert("right".to_string(), vec![Side::XiMax]);
    t.insert("bottom".to_string(), vec![Side::EtaMin]);
    t.insert("top".to_string(), vec![Side::EtaMax]);
    t
}
