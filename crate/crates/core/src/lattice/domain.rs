use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Integer lattice coordinate. The vertex `(i, j)` sits at the continuum
/// point `(i h, j h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub i: i32,
    pub j: i32,
}

impl Site {
    pub const fn new(i: i32, j: i32) -> Self {
        Site { i, j }
    }

    pub fn neighbours(self) -> [Site; 4] {
        let Site { i, j } = self;
        [
            Site::new(i + 1, j),
            Site::new(i - 1, j),
            Site::new(i, j + 1),
            Site::new(i, j - 1),
        ]
    }

    /// Sup-norm of the lattice coordinate, in lattice units.
    pub fn sup_norm(self) -> i32 {
        self.i.abs().max(self.j.abs())
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Continuum shape that a lattice domain approximates.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainShape {
    /// Open axis-aligned rectangle `(x0, x1) x (y0, y1)`.
    Rectangle { x0: f64, y0: f64, x1: f64, y1: f64 },
    /// Simple rectilinear polygon, vertices in order (either orientation).
    Polygon(Vec<(f64, f64)>),
}

impl DomainShape {
    pub fn square(side: f64, center: (f64, f64)) -> Result<Self> {
        Self::rectangle(side, side, center)
    }

    pub fn rectangle(width: f64, height: f64, center: (f64, f64)) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(Error::InvalidShape(format!(
                "rectangle sides must be positive, got {width} x {height}"
            )));
        }
        if !(center.0.is_finite() && center.1.is_finite()) {
            return Err(Error::InvalidShape("center must be finite".into()));
        }
        Ok(DomainShape::Rectangle {
            x0: center.0 - width / 2.0,
            y0: center.1 - height / 2.0,
            x1: center.0 + width / 2.0,
            y1: center.1 + height / 2.0,
        })
    }

    pub fn polygon(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::InvalidShape("polygon needs at least 4 corners".into()));
        }
        for k in 0..points.len() {
            let (a, b) = (points[k], points[(k + 1) % points.len()]);
            if !(a.0.is_finite() && a.1.is_finite()) {
                return Err(Error::InvalidShape("polygon corner is not finite".into()));
            }
            let horizontal = a.1 == b.1 && a.0 != b.0;
            let vertical = a.0 == b.0 && a.1 != b.1;
            if !(horizontal || vertical) {
                return Err(Error::InvalidShape(format!(
                    "polygon edge {k} is not axis-aligned"
                )));
            }
        }
        Ok(DomainShape::Polygon(points))
    }

    /// The standard domain `(-1, 1)^2`.
    pub fn standard_square() -> Self {
        DomainShape::Rectangle { x0: -1.0, y0: -1.0, x1: 1.0, y1: 1.0 }
    }

    pub fn is_standard_square(&self) -> bool {
        *self == Self::standard_square()
    }

    /// `(x0, y0, x1, y1)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match self {
            DomainShape::Rectangle { x0, y0, x1, y1 } => (*x0, *y0, *x1, *y1),
            DomainShape::Polygon(pts) => pts.iter().fold(
                (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
                |(a, b, c, d), &(x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)),
            ),
        }
    }

    /// Strict containment; points on the boundary are outside.
    pub fn contains_strict(&self, x: f64, y: f64) -> bool {
        match self {
            DomainShape::Rectangle { x0, y0, x1, y1 } => x > *x0 && x < *x1 && y > *y0 && y < *y1,
            DomainShape::Polygon(pts) => {
                let n = pts.len();
                // on-boundary check first
                for k in 0..n {
                    let (a, b) = (pts[k], pts[(k + 1) % n]);
                    let on_x = (x - a.0) * (b.1 - a.1) == (y - a.1) * (b.0 - a.0);
                    let within = x >= a.0.min(b.0) && x <= a.0.max(b.0) && y >= a.1.min(b.1) && y <= a.1.max(b.1);
                    if on_x && within {
                        return false;
                    }
                }
                let mut inside = false;
                for k in 0..n {
                    let (a, b) = (pts[k], pts[(k + 1) % n]);
                    if (a.1 > y) != (b.1 > y) {
                        let xc = a.0 + (y - a.1) * (b.0 - a.0) / (b.1 - a.1);
                        if x < xc {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }
}

impl fmt::Display for DomainShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainShape::Rectangle { x0, y0, x1, y1 } => {
                let (w, h) = (x1 - x0, y1 - y0);
                let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
                if w == h {
                    write!(f, "square(side={w}, center={cx},{cy})")
                } else {
                    write!(f, "rectangle(width={w}, height={h}, center={cx},{cy})")
                }
            }
            DomainShape::Polygon(pts) => {
                f.write_str("polygon(points=")?;
                for (k, (x, y)) in pts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{x} {y}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for DomainShape {
    type Err = Error;

    /// Grammar: `square(side=2.0, center=0,0)`,
    /// `rectangle(width=2, height=1, center=0,0)` or
    /// `polygon(points=0 0;2 0;2 1;0 1)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |msg: &str| Error::InvalidShape(format!("{msg} in `{s}`"));
        let open = s.find('(').ok_or_else(|| bad("missing `(`"))?;
        if !s.ends_with(')') {
            return Err(bad("missing `)`"));
        }
        let name = s[..open].trim();
        let body = &s[open + 1..s.len() - 1];

        // Regroup comma-separated tokens so that `center=0,0` stays one value.
        let mut args: Vec<(String, String)> = Vec::new();
        for tok in body.split(',') {
            match tok.split_once('=') {
                Some((k, v)) => args.push((k.trim().to_string(), v.trim().to_string())),
                None => match args.last_mut() {
                    Some((_, v)) => {
                        v.push(',');
                        v.push_str(tok.trim());
                    }
                    None if tok.trim().is_empty() => {}
                    None => return Err(bad("expected key=value")),
                },
            }
        }
        let get = |key: &str| -> Option<&str> {
            args.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
        };
        let num = |key: &str| -> Result<f64> {
            let v = get(key).ok_or_else(|| bad(&format!("missing `{key}`")))?;
            v.parse::<f64>().map_err(|_| bad(&format!("`{key}` is not a number")))
        };
        let center = || -> Result<(f64, f64)> {
            match get("center") {
                None => Ok((0.0, 0.0)),
                Some(v) => {
                    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
                    match parts.as_slice() {
                        [x, y] => Ok((
                            x.parse().map_err(|_| bad("bad center"))?,
                            y.parse().map_err(|_| bad("bad center"))?,
                        )),
                        _ => Err(bad("center must be `x,y`")),
                    }
                }
            }
        };
        let allowed: &[&str] = match name {
            "square" => &["side", "center"],
            "rectangle" => &["width", "height", "center"],
            "polygon" => &["points"],
            _ => return Err(bad(&format!("unknown shape `{name}`"))),
        };
        if let Some((k, _)) = args.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            return Err(bad(&format!("unknown argument `{k}`")));
        }
        match name {
            "square" => DomainShape::square(num("side")?, center()?),
            "rectangle" => DomainShape::rectangle(num("width")?, num("height")?, center()?),
            _ => {
                let pts = get("points").ok_or_else(|| bad("missing `points`"))?;
                let mut corners = Vec::new();
                for p in pts.split(';') {
                    let xy: Vec<&str> = p.split_whitespace().collect();
                    match xy.as_slice() {
                        [x, y] => corners.push((
                            x.parse().map_err(|_| bad("bad polygon corner"))?,
                            y.parse().map_err(|_| bad("bad polygon corner"))?,
                        )),
                        _ => return Err(bad("polygon corners are `x y` pairs")),
                    }
                }
                DomainShape::polygon(corners)
            }
        }
    }
}

pub(crate) const NONE: u32 = u32::MAX;

/// Far end of an edge leaving an interior vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeEnd {
    Interior(usize),
    /// Index into [`LatticeDomain::boundary_vertices`].
    Boundary(usize),
}

/// Unordered edge. `a` is always interior; when `b` is interior, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: EdgeEnd,
}

impl Edge {
    pub fn interior_pair(&self) -> Option<(usize, usize)> {
        match self.b {
            EdgeEnd::Interior(b) => Some((self.a, b)),
            EdgeEnd::Boundary(_) => None,
        }
    }
}

/// Mesh-`h` lattice approximation of a planar domain: interior vertices carry
/// field values, boundary vertices are pinned to zero.
#[derive(Debug, Clone)]
pub struct LatticeDomain {
    level: u32,
    mesh: f64,
    shape: Option<DomainShape>,
    // grid box holding interior and boundary vertices
    origin: Site,
    width: usize,
    height: usize,
    cell: Vec<u32>,
    interior: Vec<Site>,
    boundary: Vec<Site>,
    edges: Vec<Edge>,
    // per interior vertex: edge index in direction +x, -x, +y, -y
    incident: Vec<[u32; 4]>,
}

impl LatticeDomain {
    /// Lattice points at mesh `2^-level` strictly inside `shape`.
    pub fn build(shape: &DomainShape, level: u32) -> Result<Self> {
        if level < 2 {
            return Err(Error::InvalidParameter(format!(
                "refinement level must be at least 2, got {level}"
            )));
        }
        if level > 16 {
            return Err(Error::InvalidParameter(format!(
                "refinement level {level} is beyond desk scale"
            )));
        }
        let mesh = (-(level as f64)).exp2();
        let (x0, y0, x1, y1) = shape.bounding_box();
        let (i0, i1) = ((x0 / mesh).floor() as i64, (x1 / mesh).ceil() as i64);
        let (j0, j1) = ((y0 / mesh).floor() as i64, (y1 / mesh).ceil() as i64);
        if (i1 - i0 + 1) * (j1 - j0 + 1) > 1 << 26 {
            return Err(Error::InvalidParameter("domain has too many lattice points".into()));
        }
        let mut sites = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                if shape.contains_strict(i as f64 * mesh, j as f64 * mesh) {
                    sites.push(Site::new(i as i32, j as i32));
                }
            }
        }
        if sites.is_empty() {
            return Err(Error::DegenerateDomain { mesh });
        }
        let domain = Self::from_sites(level, Some(shape.clone()), sites);
        let components = domain.interior_components();
        if components > 1 {
            return Err(Error::DisconnectedDomain { components });
        }
        Ok(domain)
    }

    /// The standard domain `(-1,1)^2` at level `n`.
    pub fn standard(level: u32) -> Result<Self> {
        Self::build(&DomainShape::standard_square(), level)
    }

    fn from_sites(level: u32, shape: Option<DomainShape>, mut sites: Vec<Site>) -> Self {
        sites.sort_by_key(|s| (s.j, s.i));
        sites.dedup();
        let mesh = (-(level as f64)).exp2();
        let imin = sites.iter().map(|s| s.i).min().unwrap_or(0) - 1;
        let imax = sites.iter().map(|s| s.i).max().unwrap_or(0) + 1;
        let jmin = sites.iter().map(|s| s.j).min().unwrap_or(0) - 1;
        let jmax = sites.iter().map(|s| s.j).max().unwrap_or(0) + 1;
        let origin = Site::new(imin, jmin);
        let width = (imax - imin + 1) as usize;
        let height = (jmax - jmin + 1) as usize;
        let mut cell = vec![NONE; width * height];
        for (k, s) in sites.iter().enumerate() {
            cell[(s.j - jmin) as usize * width + (s.i - imin) as usize] = k as u32;
        }
        let mut domain = LatticeDomain {
            level,
            mesh,
            shape,
            origin,
            width,
            height,
            cell,
            interior: sites,
            boundary: Vec::new(),
            edges: Vec::new(),
            incident: Vec::new(),
        };

        let mut boundary_index: Vec<u32> = vec![NONE; width * height];
        let mut incident = vec![[NONE; 4]; domain.interior.len()];
        let mut edges = Vec::with_capacity(2 * domain.interior.len());
        for a in 0..domain.interior.len() {
            let site = domain.interior[a];
            for (dir, nb) in site.neighbours().into_iter().enumerate() {
                let c = domain.cell_of(nb).expect("neighbour inside grid box");
                match domain.cell[c] {
                    NONE => {
                        if boundary_index[c] == NONE {
                            boundary_index[c] = domain.boundary.len() as u32;
                            domain.boundary.push(nb);
                        }
                        incident[a][dir] = edges.len() as u32;
                        edges.push(Edge { a, b: EdgeEnd::Boundary(boundary_index[c] as usize) });
                    }
                    b if (b as usize) > a => {
                        incident[a][dir] = edges.len() as u32;
                        // opposite direction of dir: 0<->1, 2<->3
                        incident[b as usize][dir ^ 1] = edges.len() as u32;
                        edges.push(Edge { a, b: EdgeEnd::Interior(b as usize) });
                    }
                    _ => {}
                }
            }
        }
        domain.edges = edges;
        domain.incident = incident;
        domain
    }

    /// Subdomain induced by the interior vertices for which `keep` is true.
    /// Dropped vertices become boundary (Dirichlet) vertices. The result may be
    /// disconnected. Returns the subdomain and the map from its vertex indices
    /// to indices of `self`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Result<(LatticeDomain, Vec<usize>)> {
        let kept: Vec<usize> = (0..self.interior.len()).filter(|&v| keep(v)).collect();
        if kept.is_empty() {
            return Err(Error::DegenerateDomain { mesh: self.mesh });
        }
        let sites = kept.iter().map(|&v| self.interior[v]).collect();
        let sub = Self::from_sites(self.level, None, sites);
        // from_sites sorts by (j, i), which is the order of `kept` already
        Ok((sub, kept))
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn shape(&self) -> Option<&DomainShape> {
        self.shape.as_ref()
    }

    pub fn num_interior(&self) -> usize {
        self.interior.len()
    }

    pub fn interior_vertices(&self) -> &[Site] {
        &self.interior
    }

    pub fn boundary_vertices(&self) -> &[Site] {
        &self.boundary
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn site(&self, v: usize) -> Site {
        self.interior[v]
    }

    /// Continuum position of interior vertex `v`.
    pub fn position(&self, v: usize) -> (f64, f64) {
        let s = self.interior[v];
        (s.i as f64 * self.mesh, s.j as f64 * self.mesh)
    }

    pub fn index_of(&self, site: Site) -> Option<usize> {
        let c = self.cell_of(site)?;
        match self.cell[c] {
            NONE => None,
            k => Some(k as usize),
        }
    }

    /// Interior neighbours of `v` in direction order +x, -x, +y, -y.
    pub fn neighbours(&self, v: usize) -> [Option<usize>; 4] {
        let mut out = [None; 4];
        for (k, nb) in self.interior[v].neighbours().into_iter().enumerate() {
            out[k] = self.index_of(nb);
        }
        out
    }

    /// Edge indices incident to `v`, direction order +x, -x, +y, -y.
    pub fn incident_edges(&self, v: usize) -> [usize; 4] {
        self.incident[v].map(|e| e as usize)
    }

    pub fn touches_boundary(&self, v: usize) -> bool {
        self.neighbours(v).iter().any(Option::is_none)
    }

    /// Grid box covering interior and boundary vertices: origin, width, height.
    pub fn grid_box(&self) -> (Site, usize, usize) {
        (self.origin, self.width, self.height)
    }

    pub(crate) fn cell_of(&self, s: Site) -> Option<usize> {
        let x = s.i - self.origin.i;
        let y = s.j - self.origin.j;
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            None
        } else {
            Some(y as usize * self.width + x as usize)
        }
    }

    fn interior_components(&self) -> usize {
        let n = self.interior.len();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut components = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for w in self.neighbours(v).into_iter().flatten() {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        components
    }
}

impl PartialEq for LatticeDomain {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.interior == other.interior
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_quarter_mesh_has_3x3_block() {
        let shape = DomainShape::square(1.0, (0.5, 0.5)).unwrap();
        let d = LatticeDomain::build(&shape, 2).unwrap();
        assert_eq!(d.num_interior(), 9);
        assert_eq!(d.boundary_vertices().len(), 12);
        let sites: Vec<Site> = d.interior_vertices().to_vec();
        assert!(sites.iter().all(|s| (1..=3).contains(&s.i) && (1..=3).contains(&s.j)));
    }

    #[test]
    fn standard_square_vertex_count() {
        for n in 2..=6u32 {
            let d = LatticeDomain::standard(n).unwrap();
            let side = (1usize << (n + 1)) - 1;
            assert_eq!(d.num_interior(), side * side);
            assert_eq!(d.boundary_vertices().len(), 4 * side);
        }
    }

    #[test]
    fn tiny_square_is_degenerate() {
        let h = 0.25;
        let shape = DomainShape::square(h / 2.0, (h / 2.0, h / 2.0)).unwrap();
        let err = LatticeDomain::build(&shape, 2).unwrap_err();
        assert!(matches!(err, Error::DegenerateDomain { .. }));
        assert!(err.to_string().contains("degenerate domain"));
    }

    #[test]
    fn every_interior_vertex_has_four_edges() {
        let shape: DomainShape = "polygon(points=0 0;1 0;1 0.5;0.5 0.5;0.5 1;0 1)".parse().unwrap();
        let d = LatticeDomain::build(&shape, 3).unwrap();
        let mut degree = vec![0usize; d.num_interior()];
        for e in d.edges() {
            degree[e.a] += 1;
            if let EdgeEnd::Interior(b) = e.b {
                degree[b] += 1;
            }
        }
        assert!(degree.iter().all(|&k| k == 4));
        for v in 0..d.num_interior() {
            let inc = d.incident_edges(v);
            assert!(inc.iter().all(|&e| e < d.edges().len()));
        }
        // boundary and interior disjoint
        for b in d.boundary_vertices() {
            assert!(d.index_of(*b).is_none());
        }
    }

    #[test]
    fn l_shape_excludes_notch() {
        let shape: DomainShape = "polygon(points=0 0;1 0;1 0.5;0.5 0.5;0.5 1;0 1)".parse().unwrap();
        let d = LatticeDomain::build(&shape, 2).unwrap();
        // h = 1/4: full 3x3 block minus the points with x,y >= 0.5 except on the notch edges
        let sites: Vec<(i32, i32)> = d.interior_vertices().iter().map(|s| (s.i, s.j)).collect();
        assert!(sites.contains(&(1, 1)));
        assert!(!sites.contains(&(2, 2)), "corner of the notch lies on the boundary");
        assert!(!sites.contains(&(3, 3)));
        assert!(sites.contains(&(3, 1)));
    }

    #[test]
    fn parse_shapes() {
        let s: DomainShape = "square(side=2.0, center=0,0)".parse().unwrap();
        assert!(s.is_standard_square());
        let r: DomainShape = "rectangle(width=3, height=1, center=1.5,0.5)".parse().unwrap();
        assert_eq!(r.bounding_box(), (0.0, 0.0, 3.0, 1.0));
        assert!("circle(r=1)".parse::<DomainShape>().is_err());
        assert!("square(side=-1)".parse::<DomainShape>().is_err());
        assert!("square(side=1, colour=red)".parse::<DomainShape>().is_err());
        let back: DomainShape = s.to_string().parse().unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn disconnected_polygon_rejected() {
        // two bands joined by a neck at 0.52 < x < 0.55, which holds no multiple of 1/8
        let two = DomainShape::Polygon(vec![
            (0.0, 0.0), (1.0, 0.0), (1.0, 0.3), (0.55, 0.3), (0.55, 0.7), (1.0, 0.7),
            (1.0, 1.0), (0.0, 1.0), (0.0, 0.7), (0.52, 0.7), (0.52, 0.3), (0.0, 0.3),
        ]);
        match LatticeDomain::build(&two, 3) {
            Err(Error::DisconnectedDomain { components }) => assert_eq!(components, 2),
            other => panic!("expected disconnected, got {other:?}"),
        }
    }

    #[test]
    fn restrict_keeps_order_and_map() {
        let d = LatticeDomain::standard(2).unwrap();
        let (sub, map) = d.restrict(|v| d.site(v).i != 0).unwrap();
        assert_eq!(sub.num_interior(), map.len());
        for (k, &p) in map.iter().enumerate() {
            assert_eq!(sub.site(k), d.site(p));
        }
        assert!(d.restrict(|_| false).is_err());
    }
}
