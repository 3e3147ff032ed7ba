//! Vertices of the g-cube, the sum set of vertex pairs, and faces.
//!
//! Vertices are indexed little-endian: coordinate `i` (0-based) of the vertex
//! with index `k` is bit `i` of `k`. All index sets in this module are 0-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_GENUS: usize = 16;

pub(crate) fn check_genus(g: usize, max: usize) -> Result<()> {
    if g == 0 || g > max {
        return Err(Error::input(format!("genus {g} outside supported range 1..={max}")));
    }
    Ok(())
}

/// A point of `{0,1}^g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    genus: u8,
    index: u32,
}

impl Vertex {
    pub fn new(genus: usize, index: usize) -> Result<Self> {
        check_genus(genus, MAX_GENUS)?;
        if index >= 1 << genus {
            return Err(Error::input(format!("vertex index {index} out of range for genus {genus}")));
        }
        Ok(Vertex { genus: genus as u8, index: index as u32 })
    }

    pub fn from_coords(coords: &[u8]) -> Result<Self> {
        let mut index = 0usize;
        for (i, &c) in coords.iter().enumerate() {
            match c {
                0 => {}
                1 => index |= 1 << i,
                _ => return Err(Error::input(format!("vertex coordinate {c} is not a bit"))),
            }
        }
        Vertex::new(coords.len(), index)
    }

    pub fn genus(&self) -> usize {
        self.genus as usize
    }

    pub fn index(&self) -> usize {
        self.index as usize
    }

    pub fn bit(&self, i: usize) -> u8 {
        ((self.index >> i) & 1) as u8
    }

    pub fn coords(&self) -> Vec<u8> {
        (0..self.genus()).map(|i| self.bit(i)).collect()
    }

    pub fn weight(&self) -> u32 {
        self.index.count_ones()
    }

    /// Vertex with the bits in `set` flipped.
    pub fn flipped(&self, set: &BTreeSet<usize>) -> Vertex {
        let mask = set.iter().fold(0u32, |m, &i| m | (1 << i));
        Vertex { genus: self.genus, index: self.index ^ mask }
    }
}

/// Coordinates as a digit string, first coordinate first (`a_110` style labels).
impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.genus() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

pub fn vertices(g: usize) -> Result<Vec<Vertex>> {
    check_genus(g, MAX_GENUS)?;
    Ok((0..1usize << g).map(|k| Vertex { genus: g as u8, index: k as u32 }).collect())
}

/// A point of `{0,1,2}^g` with at least one coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoublePoint {
    coords: Vec<u8>,
}

impl DoublePoint {
    pub fn new(coords: Vec<u8>) -> Result<Self> {
        check_genus(coords.len(), MAX_GENUS)?;
        if coords.iter().any(|&c| c > 2) {
            return Err(Error::input(format!("double point {coords:?} has a coordinate > 2")));
        }
        if !coords.contains(&1) {
            return Err(Error::input(format!("double point {coords:?} has no coordinate equal to 1")));
        }
        Ok(DoublePoint { coords })
    }

    /// Canonical face point `Σ_{i∈D} e_i` for a nonempty direction `D`.
    pub fn canonical(genus: usize, direction: &BTreeSet<usize>) -> Result<Self> {
        if direction.iter().any(|&i| i >= genus) {
            return Err(Error::input("direction index out of range"));
        }
        let mut coords = vec![0; genus];
        for &i in direction {
            coords[i] = 1;
        }
        DoublePoint::new(coords)
    }

    pub fn parse(label: &str) -> Result<Self> {
        let coords = label
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::input(format!("bad label {label:?}"))))
            .collect::<Result<Vec<_>>>()?;
        DoublePoint::new(coords)
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn genus(&self) -> usize {
        self.coords.len()
    }

    /// Number of coordinates equal to 1 (the dimension of the face).
    pub fn ones(&self) -> usize {
        self.coords.iter().filter(|&&c| c == 1).count()
    }

    pub fn is_uniquely_attained(&self) -> bool {
        self.ones() == 1
    }
}

impl fmt::Display for DoublePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.coords {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// All `3^g − 2^g` points of the sum set, in little-endian base-3 order.
pub fn double_points(g: usize) -> Result<Vec<DoublePoint>> {
    check_genus(g, MAX_GENUS)?;
    let total = 3usize.pow(g as u32);
    let mut out = Vec::with_capacity(total - (1 << g));
    let mut coords = vec![0u8; g];
    for _ in 0..total {
        if coords.contains(&1) {
            out.push(DoublePoint { coords: coords.clone() });
        }
        // base-3 increment
        for c in coords.iter_mut() {
            if *c == 2 {
                *c = 0;
            } else {
                *c += 1;
                break;
            }
        }
    }
    Ok(out)
}

/// Unordered vertex pairs summing to `d`, `2^{ones(d)−1}` of them.
///
/// The first vertex of each pair always carries the lowest free coordinate.
pub fn attained_pairs(d: &DoublePoint) -> Vec<(Vertex, Vertex)> {
    let g = d.genus();
    let base = d
        .coords
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == 2)
        .fold(0u32, |m, (i, _)| m | (1 << i));
    let free: Vec<usize> = (0..g).filter(|&i| d.coords[i] == 1).collect();
    let (lead, rest) = free.split_first().expect("double point has a free coordinate");
    let all_free = free.iter().fold(0u32, |m, &i| m | (1 << i));
    (0u32..1 << rest.len())
        .map(|sel| {
            let mut first = base | (1 << lead);
            for (j, &i) in rest.iter().enumerate() {
                if sel >> j & 1 == 1 {
                    first |= 1 << i;
                }
            }
            let second = base | (all_free & !(first & all_free));
            (Vertex { genus: g as u8, index: first }, Vertex { genus: g as u8, index: second })
        })
        .collect()
}

/// A face of the cube: free coordinates (`direction`) and fixed coordinate values in `{0,2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceDescriptor {
    pub direction: BTreeSet<usize>,
    pub fixed: BTreeMap<usize, u8>,
}

pub fn face_of(d: &DoublePoint) -> FaceDescriptor {
    let mut direction = BTreeSet::new();
    let mut fixed = BTreeMap::new();
    for (i, &c) in d.coords.iter().enumerate() {
        if c == 1 {
            direction.insert(i);
        } else {
            fixed.insert(i, c);
        }
    }
    FaceDescriptor { direction, fixed }
}

impl FaceDescriptor {
    pub fn genus(&self) -> usize {
        self.direction.len() + self.fixed.len()
    }

    pub fn point(&self) -> DoublePoint {
        let mut coords = vec![1u8; self.genus()];
        for (&i, &v) in &self.fixed {
            coords[i] = v;
        }
        DoublePoint { coords }
    }
}

/// Fixed coordinates where two same-direction faces disagree.
pub fn difference(f1: &FaceDescriptor, f2: &FaceDescriptor) -> Result<BTreeSet<usize>> {
    if f1.direction != f2.direction || f1.genus() != f2.genus() {
        return Err(Error::input("faces have different directions"));
    }
    Ok(f1.fixed.iter().filter(|(i, v)| f2.fixed.get(i) != Some(v)).map(|(&i, _)| i).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dp(c: &[u8]) -> DoublePoint {
        DoublePoint::new(c.to_vec()).unwrap()
    }

    fn v(c: &[u8]) -> Vertex {
        Vertex::from_coords(c).unwrap()
    }

    #[test]
    fn vertex_order_is_little_endian() {
        let vs = vertices(2).unwrap();
        let coords: Vec<_> = vs.iter().map(|v| v.coords()).collect();
        assert_eq!(coords, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(vertices(1).unwrap().len(), 2);
        assert_eq!(vertices(3).unwrap()[7].coords(), vec![1, 1, 1]);
        assert!(vertices(0).is_err());
        assert!(vertices(17).is_err());
    }

    #[test]
    fn double_point_counts() {
        assert_eq!(double_points(1).unwrap(), vec![dp(&[1])]);
        let g2: BTreeSet<_> = double_points(2).unwrap().into_iter().collect();
        let expect: BTreeSet<_> = [[1, 0], [0, 1], [1, 1], [1, 2], [2, 1]].iter().map(|c| dp(c)).collect();
        assert_eq!(g2, expect);
        assert_eq!(double_points(3).unwrap().len(), 19);
    }

    #[test]
    fn pairs_of_small_points() {
        let got: BTreeSet<_> = attained_pairs(&dp(&[1, 1, 0]))
            .into_iter()
            .map(|(a, b)| BTreeSet::from([a, b]))
            .collect();
        let expect = BTreeSet::from([
            BTreeSet::from([v(&[1, 0, 0]), v(&[0, 1, 0])]),
            BTreeSet::from([v(&[1, 1, 0]), v(&[0, 0, 0])]),
        ]);
        assert_eq!(got, expect);

        let unique = attained_pairs(&dp(&[1, 2]));
        assert_eq!(unique.len(), 1);
        assert_eq!(BTreeSet::from([unique[0].0, unique[0].1]), BTreeSet::from([v(&[0, 1]), v(&[1, 1])]));

        assert_eq!(attained_pairs(&dp(&[1, 1, 1, 1, 0])).len(), 8);
    }

    #[test]
    fn invalid_double_points() {
        assert!(DoublePoint::new(vec![0, 2]).is_err());
        assert!(DoublePoint::new(vec![1, 3]).is_err());
    }

    #[test]
    fn faces() {
        let f = face_of(&dp(&[1, 2, 0]));
        assert_eq!(f.direction, BTreeSet::from([0]));
        assert_eq!(f.fixed, BTreeMap::from([(1, 2), (2, 0)]));
        assert_eq!(f.point(), dp(&[1, 2, 0]));

        // edges conv(010, 011) and conv(110, 111): direction {x3}, difference {x1}
        let e1 = face_of(&dp(&[0, 2, 1]));
        let e2 = face_of(&dp(&[2, 2, 1]));
        assert_eq!(e1.direction, BTreeSet::from([2]));
        assert_eq!(difference(&e1, &e2).unwrap(), BTreeSet::from([0]));
        assert!(difference(&e1, &e1).unwrap().is_empty());
        assert!(difference(&e1, &f).is_err());
    }

    /// Brute-force oracle: all unordered pairs of distinct vertices, bucketed by sum.
    fn brute_force_buckets(g: usize) -> BTreeMap<Vec<u8>, usize> {
        let vs = vertices(g).unwrap();
        let mut buckets = BTreeMap::new();
        for (i, a) in vs.iter().enumerate() {
            for b in &vs[i + 1..] {
                let s: Vec<u8> = a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect();
                *buckets.entry(s).or_insert(0) += 1;
            }
        }
        buckets
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for g in 1..=6 {
            let buckets = brute_force_buckets(g);
            let dps = double_points(g).unwrap();
            assert_eq!(dps.len(), 3usize.pow(g as u32) - (1 << g));
            assert_eq!(buckets.len(), dps.len());
            let mut total = 0;
            for d in &dps {
                let pairs = attained_pairs(d);
                assert_eq!(pairs.len(), buckets[d.coords()], "{d}");
                assert_eq!(pairs.len(), 1 << (d.ones() - 1));
                for (a, b) in &pairs {
                    let s: Vec<u8> = a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect();
                    assert_eq!(&s[..], d.coords());
                }
                total += pairs.len();
            }
            let n = 1usize << g;
            assert_eq!(total, n * (n - 1) / 2);
        }
    }

    #[test]
    fn uniquely_attained_count() {
        for g in 1..=8 {
            let unique = double_points(g).unwrap().iter().filter(|d| attained_pairs(d).len() == 1).count();
            assert_eq!(unique, g << (g - 1));
        }
    }
}
