//! Boolean rasters of region predicates over the `(c, w)` rectangle, with
//! areas, overlaps, subset fractions, and boundary-band-aware agreement.
//!
//! Sampling is at cell centers. Cells adjacent to a membership change form
//! the boundary band; strict-inequality sets have measure-zero boundaries,
//! so exact-agreement assertions exclude the band instead of flaking there.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::regions::{Region, RegionId};

/// Cell-center sampling grid. `c_i = c_min + (i + 0.5) Δc`, likewise for `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub c_min: f64,
    pub c_max: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub n_c: usize,
    pub n_w: usize,
}

impl GridSpec {
    pub fn new(
        c_min: f64,
        c_max: f64,
        w_min: f64,
        w_max: f64,
        n_c: usize,
        n_w: usize,
    ) -> Result<Self> {
        let all_finite =
            c_min.is_finite() && c_max.is_finite() && w_min.is_finite() && w_max.is_finite();
        if !all_finite {
            return Err(Error::Domain("grid bounds must be finite".into()));
        }
        // c_min = 0 is allowed: cell centers stay strictly positive
        if c_min < 0.0 || c_min >= c_max {
            return Err(Error::Domain(format!(
                "grid needs 0 <= c_min < c_max, got [{c_min}, {c_max}]"
            )));
        }
        if w_min < -1.0 || w_max > 1.0 || w_min >= w_max {
            return Err(Error::Domain(format!(
                "grid needs -1 <= w_min < w_max <= 1, got [{w_min}, {w_max}]"
            )));
        }
        if n_c < 16 || n_w < 16 {
            return Err(Error::Domain(format!(
                "grid needs at least 16 cells per axis, got {n_c}x{n_w}"
            )));
        }
        Ok(GridSpec {
            c_min,
            c_max,
            w_min,
            w_max,
            n_c,
            n_w,
        })
    }

    /// Default comparison window covering every built-in region.
    pub fn default_window(n_c: usize, n_w: usize) -> Result<Self> {
        GridSpec::new(0.0, 4.0, -1.0, 1.0, n_c, n_w)
    }

    pub fn c_at(&self, i: usize) -> f64 {
        self.c_min + (i as f64 + 0.5) * (self.c_max - self.c_min) / self.n_c as f64
    }

    pub fn w_at(&self, j: usize) -> f64 {
        self.w_min + (j as f64 + 0.5) * (self.w_max - self.w_min) / self.n_w as f64
    }

    pub fn cell_area(&self) -> f64 {
        (self.c_max - self.c_min) / self.n_c as f64 * (self.w_max - self.w_min) / self.n_w as f64
    }

    pub fn n_cells(&self) -> usize {
        self.n_c * self.n_w
    }
}

/// Boolean membership grid with its boundary band.
#[derive(Debug, Clone)]
pub struct Raster {
    grid: GridSpec,
    region: Option<RegionId>,
    bits: Vec<bool>,
    boundary: Vec<bool>,
}

impl Raster {
    /// Rasterizes a predicate; rows are evaluated in parallel and assembled
    /// in index order, so the result is independent of scheduling.
    pub fn build(region: &dyn Region, grid: &GridSpec) -> Result<Raster> {
        let rows: Vec<Vec<bool>> = (0..grid.n_w)
            .into_par_iter()
            .map(|j| {
                let w = grid.w_at(j);
                (0..grid.n_c)
                    .map(|i| region.contains(grid.c_at(i), w))
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let bits: Vec<bool> = rows.into_iter().flatten().collect();
        Ok(Raster::from_bits(*grid, Some(region.id()), bits))
    }

    fn from_bits(grid: GridSpec, region: Option<RegionId>, bits: Vec<bool>) -> Raster {
        debug_assert_eq!(bits.len(), grid.n_cells());
        let boundary = boundary_mask(&bits, grid.n_c, grid.n_w);
        Raster {
            grid,
            region,
            bits,
            boundary,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn region(&self) -> Option<RegionId> {
        self.region
    }

    #[inline]
    pub fn bit(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.grid.n_c + i]
    }

    #[inline]
    pub fn in_boundary(&self, i: usize, j: usize) -> bool {
        self.boundary[j * self.grid.n_c + i]
    }

    pub fn member_count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary.iter().filter(|b| **b).count()
    }

    /// Member-cell count times cell area.
    pub fn area(&self) -> f64 {
        self.member_count() as f64 * self.grid.cell_area()
    }

    /// Header `c,w,member`, one row per cell, w outer and c inner, floats
    /// with nine significant digits, membership as 0/1.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "c,w,member")?;
        for j in 0..self.grid.n_w {
            let w = self.grid.w_at(j);
            for i in 0..self.grid.n_c {
                writeln!(
                    out,
                    "{:.8e},{:.8e},{}",
                    self.grid.c_at(i),
                    w,
                    u8::from(self.bit(i, j))
                )?;
            }
        }
        Ok(())
    }
}

/// Cells any of whose 4-neighbors differ in membership.
fn boundary_mask(bits: &[bool], n_c: usize, n_w: usize) -> Vec<bool> {
    let mut mask = vec![false; bits.len()];
    let at = |i: usize, j: usize| bits[j * n_c + i];
    for j in 0..n_w {
        for i in 0..n_c {
            let here = at(i, j);
            let differs = (i > 0 && at(i - 1, j) != here)
                || (i + 1 < n_c && at(i + 1, j) != here)
                || (j > 0 && at(i, j - 1) != here)
                || (j + 1 < n_w && at(i, j + 1) != here);
            mask[j * n_c + i] = differs;
        }
    }
    mask
}

fn require_same_grid(a: &Raster, b: &Raster) -> Result<()> {
    if a.grid == b.grid {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Cellwise set algebra plus the derived fractions.
pub struct SetOps {
    pub intersection: Raster,
    pub union: Raster,
    pub a_minus_b: Raster,
    /// `|A ∩ B| / |A|`, 1 when A is empty.
    pub subset_fraction_a_in_b: f64,
    /// `|A ∩ B| / |B|`, 1 when B is empty.
    pub overlap_fraction_of_b: f64,
}

pub fn set_ops(a: &Raster, b: &Raster) -> Result<SetOps> {
    require_same_grid(a, b)?;
    let zip = |f: fn(bool, bool) -> bool| -> Vec<bool> {
        a.bits
            .iter()
            .zip(&b.bits)
            .map(|(&x, &y)| f(x, y))
            .collect()
    };
    let inter_bits = zip(|x, y| x && y);
    let count_a = a.member_count();
    let count_b = b.member_count();
    let count_inter = inter_bits.iter().filter(|b| **b).count();
    let frac = |num: usize, den: usize| {
        if den == 0 {
            1.0
        } else {
            num as f64 / den as f64
        }
    };
    Ok(SetOps {
        intersection: Raster::from_bits(a.grid, None, inter_bits),
        union: Raster::from_bits(a.grid, None, zip(|x, y| x || y)),
        a_minus_b: Raster::from_bits(a.grid, None, zip(|x, y| x && !y)),
        subset_fraction_a_in_b: frac(count_inter, count_a),
        overlap_fraction_of_b: frac(count_inter, count_b),
    })
}

/// Fraction of cells outside both boundary bands on which the rasters agree.
pub fn agreement(a: &Raster, b: &Raster) -> Result<f64> {
    require_same_grid(a, b)?;
    let mut considered = 0usize;
    let mut agreeing = 0usize;
    for idx in 0..a.bits.len() {
        if a.boundary[idx] || b.boundary[idx] {
            continue;
        }
        considered += 1;
        if a.bits[idx] == b.bits[idx] {
            agreeing += 1;
        }
    }
    Ok(if considered == 0 {
        1.0
    } else {
        agreeing as f64 / considered as f64
    })
}

/// Cells of `a` outside `b` that sit outside both boundary bands; the count
/// a containment claim must drive to zero.
pub fn subset_violations(a: &Raster, b: &Raster) -> Result<usize> {
    require_same_grid(a, b)?;
    Ok((0..a.bits.len())
        .filter(|&idx| {
            a.bits[idx] && !b.bits[idx] && !a.boundary[idx] && !b.boundary[idx]
        })
        .count())
}
