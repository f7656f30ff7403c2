use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::Valuation;

/// One edge of the lower hull. `slope` is the geometric slope `dy/dx`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub start: u64,
    pub end: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub slope: Ratio<i64>,
}

impl Segment {
    pub fn length(&self) -> u64 {
        self.end - self.start
    }
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<i64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&Valuation::Finite(*r).to_string())
}

fn ser_vertices<S: serde::Serializer>(v: &[(u64, Ratio<i64>)], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (i, r) in v {
        seq.serialize_element(&(i, Valuation::Finite(*r).to_string()))?;
    }
    seq.end()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonPolygon {
    #[serde(serialize_with = "ser_vertices")]
    pub vertices: Vec<(u64, Ratio<i64>)>,
    pub segments: Vec<Segment>,
}

impl NewtonPolygon {
    /// Valuations of the roots of the polynomial whose coefficient valuations
    /// were given, increasing, each repeated by its segment length.
    pub fn root_valuations(&self) -> Vec<Ratio<i64>> {
        let mut out: Vec<Ratio<i64>> =
            self.segments.iter().flat_map(|s| std::iter::repeat(-s.slope).take(s.length() as usize)).collect();
        out.sort();
        out
    }

    pub fn slopes(&self) -> Vec<Ratio<i64>> {
        self.segments.iter().map(|s| s.slope).collect()
    }
}

fn cross(o: (u64, Ratio<i64>), a: (u64, Ratio<i64>), b: (u64, Ratio<i64>)) -> Ratio<i64> {
    let ax = Ratio::from_integer(a.0 as i64 - o.0 as i64);
    let bx = Ratio::from_integer(b.0 as i64 - o.0 as i64);
    ax * (b.1 - o.1) - (a.1 - o.1) * bx
}

/// Lower convex hull of `(index, valuation)` points. Points at infinite
/// valuation are dropped; at least two finite points are required.
pub fn newton_polygon(points: &[(u64, Valuation)]) -> Result<NewtonPolygon> {
    let mut pts: Vec<(u64, Ratio<i64>)> = points.iter().filter_map(|(i, v)| v.finite().map(|r| (*i, r))).collect();
    pts.sort();
    pts.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 = a.1.min(b.1);
            true
        } else {
            false
        }
    });
    if pts.len() < 2 {
        return Err(Error::DegenerateInput("Newton polygon needs at least two points of finite valuation".into()));
    }
    let mut hull: Vec<(u64, Ratio<i64>)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= Ratio::from_integer(0) {
            hull.pop();
        }
        hull.push(p);
    }
    let segments = hull
        .windows(2)
        .map(|w| Segment {
            start: w[0].0,
            end: w[1].0,
            slope: (w[1].1 - w[0].1) / Ratio::from_integer(w[1].0 as i64 - w[0].0 as i64),
        })
        .collect();
    Ok(NewtonPolygon { vertices: hull, segments })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: i64) -> Valuation {
        Valuation::int(x)
    }

    #[test]
    fn two_segment_hull() {
        let np = newton_polygon(&[(0, v(11)), (1, v(1)), (2, v(0))]).unwrap();
        assert_eq!(np.slopes(), vec![Ratio::from(-10), Ratio::from(-1)]);
        assert_eq!(np.root_valuations(), vec![Ratio::from(1), Ratio::from(10)]);
    }

    #[test]
    fn collinear_points_merge() {
        let np = newton_polygon(&[(0, v(2)), (1, v(1)), (2, v(0))]).unwrap();
        assert_eq!(np.segments.len(), 1);
        assert_eq!(np.segments[0].length(), 2);
    }

    #[test]
    fn infinite_points_are_skipped() {
        let np = newton_polygon(&[(0, v(3)), (1, Valuation::Infinity), (2, v(1))]).unwrap();
        assert_eq!(np.slopes(), vec![Ratio::from(-1)]);
    }

    #[test]
    fn single_point_is_degenerate() {
        assert!(matches!(newton_polygon(&[(0, v(1))]), Err(Error::DegenerateInput(_))));
    }
}
