//! PG(2, q^2), the Hermitian unital inside it and the secant/tangent split.

use std::fmt::Write as _;

use thiserror::Error;

use crate::field::{prime_power, Elem, Field, FieldError};

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("line {line} meets the unital in {count} points (expected 0, 1 or {expected})")]
    LineMeetCount { line: usize, count: usize, expected: usize },
    #[error("unital point {point} lies on {secants} secants and {tangents} tangents")]
    PointIncidence { point: usize, secants: usize, tangents: usize },
    #[error("unital has {found} points, expected {expected}")]
    UnitalSize { found: usize, expected: usize },
    #[error("secant/tangent classification disagrees between pairing and incidence scan at line {0}")]
    ClassificationMismatch(usize),
}

/// Homogeneous coordinates, normalised so that the first nonzero entry is 1.
pub type Triple = [Elem; 3];

/// The projective plane over a field, points and lines in canonical order.
///
/// Order (shared by points and lines): `(1, y, z)` with `y` major, then
/// `(0, 1, z)`, then `(0, 0, 1)`. Ids are positions in that order.
#[derive(Debug)]
pub struct ProjectivePlane {
    field: Field,
}

impl ProjectivePlane {
    pub fn new(field: Field) -> Self {
        ProjectivePlane { field }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of points (equally, lines): `Q^2 + Q + 1` for a field of order `Q`.
    pub fn size(&self) -> usize {
        let n = self.field.order() as usize;
        n * n + n + 1
    }

    pub fn triple(&self, id: usize) -> Triple {
        let n = self.field.order() as usize;
        if id < n * n {
            [Elem::ONE, Elem((id / n) as u32), Elem((id % n) as u32)]
        } else if id < n * n + n {
            [Elem::ZERO, Elem::ONE, Elem((id - n * n) as u32)]
        } else {
            assert_eq!(id, n * n + n, "projective id out of range");
            [Elem::ZERO, Elem::ZERO, Elem::ONE]
        }
    }

    /// Id of the normalised triple. Panics on the zero vector.
    pub fn id_of(&self, t: &Triple) -> usize {
        let n = self.field.order() as usize;
        match (t[0].0, t[1].0) {
            (1, y) => y as usize * n + t[2].index(),
            (0, 1) => n * n + t[2].index(),
            (0, 0) if t[2] == Elem::ONE => n * n + n,
            _ => panic!("triple {t:?} is not normalised"),
        }
    }

    pub fn normalize(&self, t: Triple) -> Option<Triple> {
        let lead = t.iter().copied().find(|x| !x.is_zero())?;
        let inv = self.field.inv(lead).expect("nonzero");
        Some(t.map(|x| self.field.mul(x, inv)))
    }

    pub fn points(&self) -> impl Iterator<Item = Triple> + '_ {
        (0..self.size()).map(|id| self.triple(id))
    }

    #[inline]
    pub fn dot(&self, a: &Triple, b: &Triple) -> Elem {
        let f = &self.field;
        f.add(f.add(f.mul(a[0], b[0]), f.mul(a[1], b[1])), f.mul(a[2], b[2]))
    }

    /// Point `point` lies on line `line` iff `aX + bY + cZ = 0`.
    #[inline]
    pub fn incident(&self, point: &Triple, line: &Triple) -> bool {
        self.dot(point, line).is_zero()
    }

    pub fn cross(&self, a: &Triple, b: &Triple) -> Triple {
        let f = &self.field;
        [
            f.sub(f.mul(a[1], b[2]), f.mul(a[2], b[1])),
            f.sub(f.mul(a[2], b[0]), f.mul(a[0], b[2])),
            f.sub(f.mul(a[0], b[1]), f.mul(a[1], b[0])),
        ]
    }

    /// The unique line through two distinct points (or point through two lines).
    pub fn join(&self, a: &Triple, b: &Triple) -> Option<usize> {
        self.normalize(self.cross(a, b)).map(|t| self.id_of(&t))
    }

    /// `X^(q+1) + Y^(q+1) + Z^(q+1)`, which lies in GF(q).
    pub fn hermitian_form(&self, t: &Triple) -> Result<Elem, FieldError> {
        let f = &self.field;
        let mut acc = Elem::ZERO;
        for &x in t {
            acc = f.add(acc, f.norm(x)?);
        }
        Ok(acc)
    }
}

/// The Hermitian unital with its secants, tangents and point/secant incidence.
///
/// Unital points carry a dense local index `0..q^3+1` (ascending plane id);
/// secants likewise carry a dense index `0..q^4-q^3+q^2` (ascending line id),
/// which later becomes the vertex id of the intersection graph.
#[derive(Debug)]
pub struct UnitalIncidence {
    q: u32,
    plane: ProjectivePlane,
    /// Plane ids of unital points.
    points: Vec<usize>,
    /// Plane line ids of secants.
    secants: Vec<usize>,
    /// Tangent line id at each unital point.
    tangents: Vec<usize>,
    /// Unital point indices on each secant, sorted.
    secant_points: Vec<Vec<u32>>,
    /// Secants through each unital point, sorted.
    point_secants: Vec<Vec<u32>>,
    /// `secant_through[a * N + b]` is the secant joining unital points `a != b`.
    secant_through: Vec<u32>,
}

impl UnitalIncidence {
    /// Enumerates PG(2, q^2) and builds the unital for prime power `q`.
    pub fn new(q: u32) -> Result<Self, GeometryError> {
        let (p, k) = prime_power(q as u64).ok_or(GeometryError::NotPrimePower(q as u64))?;
        let field = Field::new(p, 2 * k)?;
        Self::from_plane(ProjectivePlane::new(field))
    }

    pub fn from_plane(plane: ProjectivePlane) -> Result<Self, GeometryError> {
        let q = plane.field().base_order()?;
        let qs = q as usize;

        let mut points = Vec::new();
        for (id, t) in plane.points().enumerate() {
            if plane.hermitian_form(&t)?.is_zero() {
                points.push(id);
            }
        }
        let expected = qs * qs * qs + 1;
        if points.len() != expected {
            return Err(GeometryError::UnitalSize { found: points.len(), expected });
        }
        let triples: Vec<Triple> = points.iter().map(|&id| plane.triple(id)).collect();
        let np = points.len();

        // Secants by pairing unital points and dualising.
        let mut line_points: Vec<Vec<u32>> = vec![Vec::new(); plane.size()];
        for a in 0..np {
            for b in a + 1..np {
                let line = plane.join(&triples[a], &triples[b]).expect("distinct points");
                let bucket = &mut line_points[line];
                for x in [a as u32, b as u32] {
                    if !bucket.contains(&x) {
                        bucket.push(x);
                    }
                }
            }
        }

        // Independent classification by exhaustive incidence.
        let mut tangents = vec![usize::MAX; np];
        let mut secants = Vec::new();
        let mut secant_points = Vec::new();
        for line in 0..plane.size() {
            let lt = plane.triple(line);
            let on: Vec<u32> = (0..np).filter(|&i| plane.incident(&triples[i], &lt)).map(|i| i as u32).collect();
            match on.len() {
                0 => {}
                1 => {
                    if !line_points[line].is_empty() {
                        return Err(GeometryError::ClassificationMismatch(line));
                    }
                    let i = on[0] as usize;
                    if tangents[i] != usize::MAX {
                        return Err(GeometryError::PointIncidence { point: i, secants: 0, tangents: 2 });
                    }
                    tangents[i] = line;
                }
                c if c == qs + 1 => {
                    let mut paired = std::mem::take(&mut line_points[line]);
                    paired.sort_unstable();
                    if paired != on {
                        return Err(GeometryError::ClassificationMismatch(line));
                    }
                    secants.push(line);
                    secant_points.push(on);
                }
                count => return Err(GeometryError::LineMeetCount { line, count, expected: qs + 1 }),
            }
        }

        let mut point_secants: Vec<Vec<u32>> = vec![Vec::new(); np];
        let mut secant_through = vec![u32::MAX; np * np];
        for (s, pts) in secant_points.iter().enumerate() {
            for &a in pts {
                point_secants[a as usize].push(s as u32);
                for &b in pts {
                    if a != b {
                        secant_through[a as usize * np + b as usize] = s as u32;
                    }
                }
            }
        }
        for (i, through) in point_secants.iter().enumerate() {
            let tangent_count = usize::from(tangents[i] != usize::MAX);
            if through.len() != qs * qs || tangent_count != 1 {
                return Err(GeometryError::PointIncidence {
                    point: i,
                    secants: through.len(),
                    tangents: tangent_count,
                });
            }
        }

        Ok(UnitalIncidence { q, plane, points, secants, tangents, secant_points, point_secants, secant_through })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn plane(&self) -> &ProjectivePlane {
        &self.plane
    }

    /// Plane ids of the unital points.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    /// Plane line ids of the secants.
    pub fn secants(&self) -> &[usize] {
        &self.secants
    }

    pub fn num_secants(&self) -> usize {
        self.secants.len()
    }

    /// Tangent line (plane id) at each unital point.
    pub fn tangents(&self) -> &[usize] {
        &self.tangents
    }

    /// Unital point indices on secant `s`.
    pub fn secant_points(&self, s: usize) -> &[u32] {
        &self.secant_points[s]
    }

    /// Secants through unital point `a`.
    pub fn point_secants(&self, a: usize) -> &[u32] {
        &self.point_secants[a]
    }

    /// Secant joining distinct unital points `a` and `b`.
    #[inline]
    pub fn secant_through(&self, a: u32, b: u32) -> u32 {
        let s = self.secant_through[a as usize * self.points.len() + b as usize];
        debug_assert_ne!(s, u32::MAX, "no secant through {a} and {b}");
        s
    }

    /// Text export: `q npoints nsecants`, then one line per secant with its
    /// unital point indices.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} {}", self.q, self.num_points(), self.num_secants()).unwrap();
        for pts in &self.secant_points {
            let line: Vec<String> = pts.iter().map(u32::to_string).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(q: u32) -> ProjectivePlane {
        let (p, k) = prime_power(q as u64).unwrap();
        ProjectivePlane::new(Field::new(p, 2 * k).unwrap())
    }

    #[test]
    fn plane_sizes() {
        assert_eq!(plane(2).size(), 21);
        assert_eq!(plane(3).size(), 91);
    }

    #[test]
    fn ids_round_trip_and_lines_have_q2_plus_1_points() {
        for q in [2, 3] {
            let pl = plane(q);
            let qq = (q * q) as usize;
            for id in 0..pl.size() {
                assert_eq!(pl.id_of(&pl.triple(id)), id);
            }
            for line in pl.points() {
                let count = pl.points().filter(|pt| pl.incident(pt, &line)).count();
                assert_eq!(count, qq + 1);
            }
        }
    }

    #[test]
    fn two_points_determine_one_line() {
        for q in [2, 3] {
            let pl = plane(q);
            let pts: Vec<Triple> = pl.points().collect();
            let lines: Vec<Triple> = pl.points().collect();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    let common: Vec<usize> = (0..lines.len())
                        .filter(|&l| pl.incident(&pts[a], &lines[l]) && pl.incident(&pts[b], &lines[l]))
                        .collect();
                    assert_eq!(common, vec![pl.join(&pts[a], &pts[b]).unwrap()]);
                }
            }
        }
    }

    #[test]
    fn unital_counts_small_q() {
        for q in [2u32, 3, 4] {
            let u = UnitalIncidence::new(q).unwrap();
            let qs = q as usize;
            assert_eq!(u.num_points(), qs.pow(3) + 1);
            assert_eq!(u.num_secants(), qs.pow(4) - qs.pow(3) + qs.pow(2));
            assert_eq!(u.tangents().len(), qs.pow(3) + 1);
            let mut tangents = u.tangents().to_vec();
            tangents.sort_unstable();
            tangents.dedup();
            assert_eq!(tangents.len(), qs.pow(3) + 1, "one distinct tangent per point");
            for s in 0..u.num_secants() {
                assert_eq!(u.secant_points(s).len(), qs + 1);
            }
            for a in 0..u.num_points() {
                assert_eq!(u.point_secants(a).len(), qs * qs);
            }
        }
    }

    #[test]
    fn q2_has_nine_points_and_q4_has_208_secants() {
        assert_eq!(UnitalIncidence::new(2).unwrap().num_points(), 9);
        assert_eq!(UnitalIncidence::new(3).unwrap().num_secants(), 63);
        let u = UnitalIncidence::new(4).unwrap();
        assert_eq!(u.num_secants(), 208);
        assert!((0..208).all(|s| u.secant_points(s).len() == 5));
    }

    #[test]
    fn secant_through_is_consistent() {
        let u = UnitalIncidence::new(3).unwrap();
        for a in 0..u.num_points() as u32 {
            for b in 0..u.num_points() as u32 {
                if a != b {
                    let s = u.secant_through(a, b) as usize;
                    assert!(u.secant_points(s).contains(&a));
                    assert!(u.secant_points(s).contains(&b));
                }
            }
        }
    }

    #[test]
    fn export_header() {
        let u = UnitalIncidence::new(2).unwrap();
        let text = u.export_text();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("2 9 12"));
        assert_eq!(lines.count(), 12);
    }

    #[test]
    fn rejects_non_prime_power() {
        assert!(matches!(UnitalIncidence::new(6), Err(GeometryError::NotPrimePower(6))));
    }
}
