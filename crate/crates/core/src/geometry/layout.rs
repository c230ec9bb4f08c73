use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// A planar array built from equally sized rectangular subarrays.
///
/// Antennas are numbered subarray-major, then row (`n_z`), then column
/// (`n_x`). Subarray `k` therefore owns the contiguous index range
/// `k * na() .. (k + 1) * na()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayLayout {
    offsets: Vec<(u32, u32)>,
    na_x: usize,
    na_z: usize,
    d: f64,
}

impl ArrayLayout {
    /// `offsets` are subarray positions `(m_x, m_z)` in units of `d`.
    pub fn new(offsets: Vec<(u32, u32)>, na_x: usize, na_z: usize, d: f64) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::validation("subarray_offsets", "at least one subarray"));
        }
        if offsets[0] != (0, 0) {
            return Err(Error::validation(
                "subarray_offsets",
                "first subarray must sit at (0, 0)",
            ));
        }
        for (i, a) in offsets.iter().enumerate() {
            if offsets[..i].contains(a) {
                return Err(Error::validation(
                    "subarray_offsets",
                    format!("duplicate offset {a:?}"),
                ));
            }
        }
        if na_x == 0 || na_z == 0 {
            return Err(Error::validation("na_x/na_z", "subarray grid must be at least 1x1"));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::validation("d", "antenna spacing must be positive"));
        }
        Ok(Self {
            offsets,
            na_x,
            na_z,
            d,
        })
    }

    /// Regular `sub_x` by `sub_z` grid of subarrays whose reference antennas
    /// are `pitch` antenna spacings apart.
    pub fn regular(
        sub_x: usize,
        sub_z: usize,
        pitch: u32,
        na_x: usize,
        na_z: usize,
        d: f64,
    ) -> Result<Self> {
        if sub_x == 0 || sub_z == 0 {
            return Err(Error::validation("subarrays", "need at least one subarray"));
        }
        if pitch == 0 && sub_x * sub_z > 1 {
            return Err(Error::validation("spacing", "pitch must be positive"));
        }
        let mut offsets = Vec::with_capacity(sub_x * sub_z);
        for iz in 0..sub_z {
            for ix in 0..sub_x {
                offsets.push((ix as u32 * pitch, iz as u32 * pitch));
            }
        }
        Self::new(offsets, na_x, na_z, d)
    }

    /// One antenna per subarray: the fully spherical limit of the hybrid model.
    pub fn split_to_antennas(&self) -> Self {
        let mut offsets = Vec::with_capacity(self.n());
        for &(mx, mz) in &self.offsets {
            for nz in 0..self.na_z as u32 {
                for nx in 0..self.na_x as u32 {
                    offsets.push((mx + nx, mz + nz));
                }
            }
        }
        Self {
            offsets,
            na_x: 1,
            na_z: 1,
            d: self.d,
        }
    }

    pub fn offsets(&self) -> &[(u32, u32)] {
        &self.offsets
    }

    pub fn na_x(&self) -> usize {
        self.na_x
    }

    pub fn na_z(&self) -> usize {
        self.na_z
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn with_spacing(&self, d: f64) -> Result<Self> {
        Self::new(self.offsets.clone(), self.na_x, self.na_z, d)
    }

    /// Number of subarrays K.
    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    /// Antennas per subarray.
    pub fn na(&self) -> usize {
        self.na_x * self.na_z
    }

    /// Total antenna count N.
    pub fn n(&self) -> usize {
        self.k() * self.na()
    }

    fn check(&self, k: usize, n_x: usize, n_z: usize) -> Result<()> {
        if k >= self.k() || n_x >= self.na_x || n_z >= self.na_z {
            return Err(Error::invalid(format!(
                "antenna (k={k}, n_x={n_x}, n_z={n_z}) outside layout with K={}, grid {}x{}",
                self.k(),
                self.na_x,
                self.na_z
            )));
        }
        Ok(())
    }

    pub fn index(&self, k: usize, n_x: usize, n_z: usize) -> Result<usize> {
        self.check(k, n_x, n_z)?;
        Ok(k * self.na() + n_z * self.na_x + n_x)
    }

    /// Integer grid coordinates `(m_x + n_x, m_z + n_z)` for every antenna,
    /// in index order.
    pub fn grid(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.n());
        for &(mx, mz) in &self.offsets {
            for nz in 0..self.na_z as i64 {
                for nx in 0..self.na_x as i64 {
                    out.push((mx as i64 + nx, mz as i64 + nz));
                }
            }
        }
        out
    }

    /// Grid coordinates `(n_x, n_z)` within one subarray, in index order.
    pub fn local_grid(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.na());
        for nz in 0..self.na_z as i64 {
            for nx in 0..self.na_x as i64 {
                out.push((nx, nz));
            }
        }
        out
    }

    /// Local position of subarray `k`'s reference antenna.
    pub fn subarray_offset(&self, k: usize) -> Result<Vec3> {
        self.antenna_position(k, 0, 0)
    }

    /// Local position `((m_x + n_x) d, 0, -(m_z + n_z) d)`.
    pub fn antenna_position(&self, k: usize, n_x: usize, n_z: usize) -> Result<Vec3> {
        self.check(k, n_x, n_z)?;
        let (mx, mz) = self.offsets[k];
        Ok(grid_point(mx as i64 + n_x as i64, mz as i64 + n_z as i64, self.d))
    }

    /// Local positions of all antennas in index order.
    pub fn positions(&self) -> Vec<Vec3> {
        self.grid()
            .into_iter()
            .map(|(x, z)| grid_point(x, z, self.d))
            .collect()
    }

    /// Largest `m_x`, `m_z` over the subarrays.
    pub fn max_offset(&self) -> (u32, u32) {
        self.offsets
            .iter()
            .fold((0, 0), |(ax, az), &(x, z)| (ax.max(x), az.max(z)))
    }
}

pub(crate) fn grid_point(x: i64, z: i64, d: f64) -> Vec3 {
    Vec3::new(x as f64 * d, 0.0, -(z as f64) * d)
}
