use super::{Bitile, Rect, Tile};
use crate::dyadic::{fwht, DyadicPoint, Grid, StepFunction};
use crate::error::{Error, Result};

#[inline]
fn parity_sign(v: u64) -> f64 {
    if v.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn reverse_low(v: u64, bits: u32) -> u64 {
    if bits == 0 {
        0
    } else {
        v.reverse_bits() >> (64 - bits)
    }
}

fn check_fits(p: &Tile, grid: &Grid) -> Result<()> {
    if p.fits(grid) {
        Ok(())
    } else {
        Err(Error::OutsideGrid {
            time: p.time(),
            freq: p.freq(),
        })
    }
}

/// `w_P(x) = 2^{-i/2} W_l(2^{-i} x - n)`, the L²-normalized Walsh packet of
/// the tile `[2^i n, 2^i (n+1)) × [2^-i l, 2^-i (l+1))`.
///
/// On `I_P` the packet is `|I_P|^{-1/2} e(x ⊗ 2^-i l)`; with local cell
/// index `q` this is the sign of `l & rev(q)` over `i + k` bits.
pub fn wave_packet(p: &Tile, grid: &Grid) -> Result<StepFunction> {
    check_fits(p, grid)?;
    let range = grid.cell_range(&p.time()).expect("checked");
    let bits = (p.scale() + grid.k as i32) as u32;
    let amp = 2f64.powf(-f64::from(p.scale()) / 2.0);
    let l = p.freq().index;
    let mut f = StepFunction::zeros(*grid, 1);
    let vals = f.values_mut();
    for (q, c) in range.enumerate() {
        vals[c] = amp * parity_sign(l & reverse_low(q as u64, bits));
    }
    Ok(f)
}

/// `w_P` at the left endpoint of grid cell `c`, without building the packet.
#[inline]
pub fn wave_packet_at(p: &Tile, grid: &Grid, c: usize) -> f64 {
    let i = p.scale();
    let bits = (i + grid.k as i32) as u32;
    if (c >> bits) as u64 != p.time().index {
        return 0.0;
    }
    let q = (c & ((1usize << bits) - 1)) as u64;
    2f64.powf(-f64::from(i) / 2.0) * parity_sign(p.freq().index & reverse_low(q, bits))
}

/// `⟨f, w_P⟩` for every tile of every scale on the grid, computed by one
/// local Walsh–Hadamard transform per time interval.
#[derive(Debug, Clone)]
pub struct TileCoefficients {
    grid: Grid,
    // by scale offset `i + k`; entry `n * 2^(i+k) + l`
    scales: Vec<Vec<f64>>,
}

impl TileCoefficients {
    pub fn new(f: &StepFunction) -> Result<Self> {
        let values = f.require_scalar()?;
        let grid = f.grid();
        let w = grid.cell_width();
        let mut scales = Vec::with_capacity(grid.bits() as usize + 1);
        for i in grid.min_scale()..=grid.max_scale() {
            let bits = (i + grid.k as i32) as u32;
            let len = 1usize << bits;
            let amp = w * 2f64.powf(-f64::from(i) / 2.0);
            let mut table = vec![0.0; grid.cells()];
            let mut buf = vec![0.0; len];
            for (block, out) in values.chunks_exact(len).zip(table.chunks_exact_mut(len)) {
                buf.copy_from_slice(block);
                fwht(&mut buf);
                for (l, o) in out.iter_mut().enumerate() {
                    *o = amp * buf[reverse_low(l as u64, bits) as usize];
                }
            }
            scales.push(table);
        }
        Ok(Self { grid, scales })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// `⟨f, w_P⟩`, or `None` when the tile is not resolved by the grid.
    pub fn get(&self, p: &Tile) -> Option<f64> {
        if !p.fits(&self.grid) {
            return None;
        }
        let i = p.scale();
        let off = (i + self.grid.k as i32) as usize;
        let idx = (p.time().index << off) | p.freq().index;
        Some(self.scales[off][idx as usize])
    }

    /// `a_P = ⟨f, w_{P₁}⟩`.
    pub fn lower(&self, p: &Bitile) -> Option<f64> {
        self.get(&p.lower())
    }
}

/// The L²-normalized Haar function of `I`: `+|I|^{-1/2}` on the left half and
/// `-|I|^{-1/2}` on the right half.
pub fn haar_function(iv: &crate::dyadic::DyadicInterval, grid: &Grid) -> Result<StepFunction> {
    let range = grid
        .cell_range(iv)
        .filter(|r| r.len() >= 2)
        .ok_or(Error::OutsideGrid {
            time: *iv,
            freq: *iv,
        })?;
    let amp = iv.length().powf(-0.5);
    let mid = range.start + range.len() / 2;
    let mut f = StepFunction::zeros(*grid, 1);
    for c in range {
        f.values_mut()[c] = if c < mid { amp } else { -amp };
    }
    Ok(f)
}

/// Checks `e(ξ ⊗ x) w_{P₁}(x) = ε h_{I_P}(x)` on every grid cell and returns
/// the sign `ε`.
pub fn modulated_haar_check(p: &Bitile, xi: &DyadicPoint, grid: &Grid) -> Result<i8> {
    if !p.freq_upper().contains_point(xi) {
        return Err(Error::PreconditionViolated(format!(
            "frequency {xi} is not in the upper half of {:?}",
            p.freq()
        )));
    }
    let packet = wave_packet(&p.lower(), grid)?;
    let haar = haar_function(&p.time(), grid)?;
    let t = grid.frequency_cell(xi);
    let mut eps: Option<f64> = None;
    for c in 0..grid.cells() {
        let lhs = grid.character(c, t) * packet.values()[c];
        let h = haar.values()[c];
        if h == 0.0 {
            if lhs != 0.0 {
                return Err(Error::IdentityViolation { cell: c });
            }
            continue;
        }
        let ratio = lhs / h;
        match eps {
            None if (ratio.abs() - 1.0).abs() < 1e-12 => eps = Some(ratio.signum()),
            Some(e) if (ratio - e).abs() < 1e-12 => {}
            _ => return Err(Error::IdentityViolation { cell: c }),
        }
    }
    Ok(if eps.unwrap_or(1.0) > 0.0 { 1 } else { -1 })
}
