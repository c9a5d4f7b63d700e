use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::{BoxGeometry, CoreError, Result, SeedSpec, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPoint {
    pub id: usize,
    pub position: Vec<f64>,
    pub mark: f64,
}

/// Vertices stored column-wise: `coords[i * d .. (i + 1) * d]` is point `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    geometry: BoxGeometry,
    coords: Vec<f64>,
    marks: Vec<f64>,
}

impl PointSet {
    pub fn empty(geometry: BoxGeometry) -> Self {
        PointSet { geometry, coords: Vec::new(), marks: Vec::new() }
    }

    pub fn from_parts(geometry: BoxGeometry, coords: Vec<f64>, marks: Vec<f64>) -> Result<Self> {
        geometry.validate()?;
        let d = geometry.dimension;
        if coords.len() != marks.len() * d {
            return Err(CoreError::DimensionMismatch { expected: marks.len() * d, got: coords.len() });
        }
        let mut ps = PointSet::empty(geometry);
        for (i, &m) in marks.iter().enumerate() {
            ps.push(&coords[i * d..(i + 1) * d], m)?;
        }
        Ok(ps)
    }

    pub fn from_points(geometry: BoxGeometry, points: &[MarkedPoint]) -> Result<Self> {
        let mut ps = PointSet::empty(geometry);
        for p in points {
            ps.push(&p.position, p.mark)?;
        }
        Ok(ps)
    }

    /// Appends a vertex; the new id is the previous length.
    pub fn push(&mut self, position: &[f64], mark: f64) -> Result<usize> {
        let d = self.geometry.dimension;
        if position.len() != d {
            return Err(CoreError::DimensionMismatch { expected: d, got: position.len() });
        }
        if !(mark > 0.0 && mark < 1.0) {
            return Err(CoreError::InvalidMark(mark));
        }
        if position.iter().any(|&x| !(x >= 0.0 && x < self.geometry.side)) {
            return Err(CoreError::InvalidGeometry(format!("position {position:?} outside the box")));
        }
        if self.marks.len() as u64 >= u32::MAX as u64 {
            return Err(CoreError::TooManyPoints(self.marks.len() as u64 + 1));
        }
        self.coords.extend_from_slice(position);
        self.marks.push(mark);
        Ok(self.marks.len() - 1)
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.geometry
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.geometry.dimension
    }

    #[inline]
    pub fn position(&self, i: usize) -> &[f64] {
        let d = self.geometry.dimension;
        &self.coords[i * d..(i + 1) * d]
    }

    #[inline]
    pub fn mark(&self, i: usize) -> f64 {
        self.marks[i]
    }

    pub fn marks(&self) -> &[f64] {
        &self.marks
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.geometry.distance_unchecked(self.position(i), self.position(j))
    }

    pub fn point(&self, i: usize) -> MarkedPoint {
        MarkedPoint { id: i, position: self.position(i).to_vec(), mark: self.marks[i] }
    }

    pub fn iter(&self) -> impl Iterator<Item = MarkedPoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// CSV with header `id,x_0,...,x_{d-1},mark`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.dimension();
        let mut header = String::from("id");
        for k in 0..d {
            header.push_str(&format!(",x_{k}"));
        }
        header.push_str(",mark\n");
        w.write_all(header.as_bytes())?;
        let mut line = String::new();
        for i in 0..self.len() {
            line.clear();
            line.push_str(&i.to_string());
            for x in self.position(i) {
                line.push(',');
                line.push_str(&fmt17(*x));
            }
            line.push(',');
            line.push_str(&fmt17(self.marks[i]));
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }
}

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn uniform_mark<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let t: f64 = rng.random();
        if t > 0.0 {
            return t;
        }
    }
}

fn uniform_coord<R: Rng>(rng: &mut R, side: f64) -> f64 {
    let x = rng.random::<f64>() * side;
    if x < side {
        x
    } else {
        f64::from_bits(side.to_bits() - 1)
    }
}

/// Poisson process of the given intensity in the box with i.i.d. uniform marks.
pub fn sample_poisson_points(geom: &BoxGeometry, intensity: f64, seed: &SeedSpec) -> Result<PointSet> {
    geom.validate()?;
    if !(intensity.is_finite() && intensity > 0.0) {
        return Err(CoreError::InvalidIntensity(intensity));
    }
    let mean = intensity * geom.volume();
    if !mean.is_finite() || mean > u32::MAX as f64 / 2.0 {
        return Err(CoreError::TooManyPoints(mean.min(u64::MAX as f64) as u64));
    }
    let mut rng = seed.rng(Stream::Points);
    let n = Poisson::new(mean)
        .map_err(|_| CoreError::InvalidIntensity(intensity))?
        .sample(&mut rng) as usize;
    let d = geom.dimension;
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n * d {
        coords.push(uniform_coord(&mut rng, geom.side));
    }
    let mut mrng = seed.rng(Stream::Marks);
    let marks = (0..n).map(|_| uniform_mark(&mut mrng)).collect();
    Ok(PointSet { geometry: *geom, coords, marks })
}

/// The integer points of `[0, side)^d`, lexicographic order, uniform marks.
pub fn lattice_points(geom: &BoxGeometry, seed: &SeedSpec) -> Result<PointSet> {
    geom.validate()?;
    if geom.side.fract() != 0.0 {
        return Err(CoreError::NonIntegralSide(geom.side));
    }
    let l = geom.side as u64;
    let n = l
        .checked_pow(geom.dimension as u32)
        .filter(|&n| n < u32::MAX as u64)
        .ok_or(CoreError::TooManyPoints(u64::MAX))? as usize;
    let d = geom.dimension;
    let mut coords = Vec::with_capacity(n * d);
    let mut idx = vec![0u64; d];
    for _ in 0..n {
        coords.extend(idx.iter().map(|&c| c as f64));
        for k in (0..d).rev() {
            idx[k] += 1;
            if idx[k] < l {
                break;
            }
            idx[k] = 0;
        }
    }
    let mut mrng = seed.rng(Stream::Marks);
    let marks = (0..n).map(|_| uniform_mark(&mut mrng)).collect();
    Ok(PointSet { geometry: *geom, coords, marks })
}

/// Uniform mark drawn from an arbitrary generator, never exactly zero.
pub fn draw_mark<R: Rng>(rng: &mut R) -> f64 {
    uniform_mark(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_small() {
        let g = BoxGeometry::torus(1, 3.0).unwrap();
        let p = lattice_points(&g, &SeedSpec::new(1)).unwrap();
        assert_eq!(p.coords(), &[0.0, 1.0, 2.0]);
        let g2 = BoxGeometry::torus(2, 4.0).unwrap();
        assert_eq!(lattice_points(&g2, &SeedSpec::new(1)).unwrap().len(), 16);
        assert!(lattice_points(&BoxGeometry::torus(2, 4.5).unwrap(), &SeedSpec::new(1)).is_err());
    }

    #[test]
    fn poisson_rejects_bad_intensity() {
        let g = BoxGeometry::torus(2, 10.0).unwrap();
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(sample_poisson_points(&g, bad, &SeedSpec::new(0)).is_err());
        }
    }

    #[test]
    fn csv_header() {
        let g = BoxGeometry::torus(2, 2.0).unwrap();
        let p = lattice_points(&g, &SeedSpec::new(3)).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("id,x_0,x_1,mark\n0,0.0000000000000000e0,"));
        assert_eq!(s.lines().count(), 5);
    }
}
