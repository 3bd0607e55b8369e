//! Synthetic frozen-turbulence boxes.
//!
//! A box is a periodic 3-D lattice of velocity fluctuations (u', v', w')
//! advected past the farm under Taylor's frozen-turbulence hypothesis:
//! the upstream flow at time `t` is the stored field sampled at
//! `x + ws * t` (wrapped). Fields are synthesized spectrally — white noise
//! shaped in wavenumber space by a Kaimal-like streamwise spectrum and a
//! Gaussian transverse-coherence filter — then rescaled so the sample
//! standard deviation matches the target exactly and the mean is exactly
//! zero. Generation is fully determined by the box id.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::config::InflowConfig;
use crate::error::{Error, Result};
use crate::seed;

/// Magic tag of the turbulence-box file format.
pub const MAGIC_TBOX: &[u8; 4] = b"TBOX";

const FORMAT_VERSION: u32 = 1;

/// Ratio of transverse to streamwise fluctuation std.
const SIGMA_V_RATIO: f64 = 0.8;
/// Ratio of vertical to streamwise fluctuation std.
const SIGMA_W_RATIO: f64 = 0.5;

/// TBOX metadata: everything in the file except the velocity grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxHeader {
    pub id: u64,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub sigma_u: f64,
}

/// Parses and validates a TBOX header from the start of `rdr`.
fn read_header(rdr: &mut impl Read, path: &Path) -> Result<BoxHeader> {
    let io_err = |e| Error::io(path, e);
    let mut magic = [0u8; 4];
    rdr.read_exact(&mut magic).map_err(io_err)?;
    if &magic != MAGIC_TBOX {
        return Err(Error::format(path, "not a turbulence box (bad magic)"));
    }
    let version = rdr.read_u32::<LittleEndian>().map_err(io_err)?;
    if version != FORMAT_VERSION {
        return Err(Error::format(path, format!("unsupported format version {version}")));
    }
    let nx = rdr.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let ny = rdr.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    let nz = rdr.read_u32::<LittleEndian>().map_err(io_err)? as usize;
    nx.checked_mul(ny)
        .and_then(|p| p.checked_mul(nz))
        .filter(|&p| p > 0 && p <= (1 << 31))
        .ok_or_else(|| Error::format(path, format!("implausible lattice {nx}x{ny}x{nz}")))?;
    let dx = rdr.read_f64::<LittleEndian>().map_err(io_err)?;
    let dy = rdr.read_f64::<LittleEndian>().map_err(io_err)?;
    let dz = rdr.read_f64::<LittleEndian>().map_err(io_err)?;
    let sigma_u = rdr.read_f64::<LittleEndian>().map_err(io_err)?;
    let id = rdr.read_u64::<LittleEndian>().map_err(io_err)?;
    Ok(BoxHeader { id, nx, ny, nz, dx, dy, dz, sigma_u })
}

/// Periodic lattice of 3-component velocity fluctuations, m/s.
///
/// Storage is x-major: index `(ix * ny + iy) * nz + iz`. The lattice is
/// periodic along every axis with periods `n* * d*`; `length_x` (the extent
/// of stored nodes, `(nx - 1) * dx`) is the conventional quoted box length.
#[derive(Debug, Clone)]
pub struct TurbulenceBox {
    pub id: u64,
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    /// Target streamwise fluctuation std the box was generated for, m/s.
    pub sigma_u: f64,
    pub u: Vec<f32>,
    pub v: Vec<f32>,
    pub w: Vec<f32>,
}

impl TurbulenceBox {
    /// Streamwise extent of stored nodes, m.
    pub fn length_x(&self) -> f64 {
        (self.nx - 1) as f64 * self.dx
    }

    /// Streamwise period of the underlying field, m.
    pub fn period_x(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn period_y(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    pub fn period_z(&self) -> f64 {
        self.nz as f64 * self.dz
    }

    #[inline]
    fn idx(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.ny + iy) * self.nz + iz
    }

    /// Stored fluctuation of component `c` (0 = u, 1 = v, 2 = w) at a node.
    pub fn node(&self, c: usize, ix: usize, iy: usize, iz: usize) -> f32 {
        let i = self.idx(ix, iy, iz);
        match c {
            0 => self.u[i],
            1 => self.v[i],
            2 => self.w[i],
            _ => panic!("component index {c} out of range"),
        }
    }

    /// Trilinear interpolation of all three components at a box-frame point,
    /// with periodic wrap along every axis.
    pub fn fluctuation_at(&self, x: f64, y: f64, z: f64) -> [f64; 3] {
        let (ix, fx) = wrap_index(x, self.dx, self.nx);
        let (iy, fy) = wrap_index(y, self.dy, self.ny);
        let (iz, fz) = wrap_index(z, self.dz, self.nz);
        let ix1 = (ix + 1) % self.nx;
        let iy1 = (iy + 1) % self.ny;
        let iz1 = (iz + 1) % self.nz;

        let mut out = [0.0; 3];
        let corners = [
            (ix, iy, iz, (1.0 - fx) * (1.0 - fy) * (1.0 - fz)),
            (ix1, iy, iz, fx * (1.0 - fy) * (1.0 - fz)),
            (ix, iy1, iz, (1.0 - fx) * fy * (1.0 - fz)),
            (ix, iy, iz1, (1.0 - fx) * (1.0 - fy) * fz),
            (ix1, iy1, iz, fx * fy * (1.0 - fz)),
            (ix1, iy, iz1, fx * (1.0 - fy) * fz),
            (ix, iy1, iz1, (1.0 - fx) * fy * fz),
            (ix1, iy1, iz1, fx * fy * fz),
        ];
        for &(cx, cy, cz, wgt) in &corners {
            let i = self.idx(cx, cy, cz);
            out[0] += wgt * self.u[i] as f64;
            out[1] += wgt * self.v[i] as f64;
            out[2] += wgt * self.w[i] as f64;
        }
        out
    }

    /// Sample mean and std of one stored component over the whole box.
    pub fn sample_stats(&self, c: usize) -> (f64, f64) {
        let data = match c {
            0 => &self.u,
            1 => &self.v,
            2 => &self.w,
            _ => panic!("component index {c} out of range"),
        };
        let n = data.len() as f64;
        let mean = data.iter().map(|&v| v as f64).sum::<f64>() / n;
        let var = data.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        (mean, var.sqrt())
    }

    /// Writes the box in the binary TBOX format.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut wtr = BufWriter::new(file);
        let io_err = |e| Error::io(path, e);
        wtr.write_all(MAGIC_TBOX).map_err(io_err)?;
        wtr.write_u32::<LittleEndian>(FORMAT_VERSION).map_err(io_err)?;
        wtr.write_u32::<LittleEndian>(self.nx as u32).map_err(io_err)?;
        wtr.write_u32::<LittleEndian>(self.ny as u32).map_err(io_err)?;
        wtr.write_u32::<LittleEndian>(self.nz as u32).map_err(io_err)?;
        wtr.write_f64::<LittleEndian>(self.dx).map_err(io_err)?;
        wtr.write_f64::<LittleEndian>(self.dy).map_err(io_err)?;
        wtr.write_f64::<LittleEndian>(self.dz).map_err(io_err)?;
        wtr.write_f64::<LittleEndian>(self.sigma_u).map_err(io_err)?;
        wtr.write_u64::<LittleEndian>(self.id).map_err(io_err)?;
        for comp in [&self.u, &self.v, &self.w] {
            for &val in comp {
                wtr.write_f32::<LittleEndian>(val).map_err(io_err)?;
            }
        }
        wtr.flush().map_err(io_err)
    }

    /// Reads only the TBOX header, leaving the velocity grids on disk.
    /// Cheap enough to call over a whole pool directory.
    pub fn load_header(path: &Path) -> Result<BoxHeader> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rdr = BufReader::new(file);
        read_header(&mut rdr, path)
    }

    /// Reads a TBOX file, verifying magic, version, and payload size.
    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut rdr = BufReader::new(file);
        let io_err = |e| Error::io(path, e);

        let BoxHeader { id, nx, ny, nz, dx, dy, dz, sigma_u } = read_header(&mut rdr, path)?;
        let n = nx * ny * nz;
        let mut read_comp = || -> Result<Vec<f32>> {
            let mut data = vec![0f32; n];
            let mut buf = vec![0u8; n * 4];
            rdr.read_exact(&mut buf).map_err(io_err)?;
            for (i, chunk) in buf.chunks_exact(4).enumerate() {
                data[i] = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            }
            Ok(data)
        };
        let u = read_comp()?;
        let v = read_comp()?;
        let w = read_comp()?;
        Ok(Self { id, nx, ny, nz, dx, dy, dz, sigma_u, u, v, w })
    }
}

/// Splits a periodic coordinate into (lower node index, interpolation weight).
#[inline]
fn wrap_index(coord: f64, spacing: f64, n: usize) -> (usize, f64) {
    let period = n as f64 * spacing;
    let pos = coord.rem_euclid(period) / spacing;
    let i = pos.floor() as usize;
    // rem_euclid can land exactly on the period boundary through rounding.
    (i.min(n - 1), pos - i as f64)
}

/// Kaimal-like one-dimensional spectrum shape, S(k) ∝ L / (1 + 1.5 k L)^(5/3).
fn spectrum_shape(k: f64, length_scale: f64) -> f64 {
    length_scale / (1.0 + 1.5 * k * length_scale).powf(5.0 / 3.0)
}

/// Generates a turbulence box for the given inflow. Deterministic in `id`:
/// regenerating with the same id and parameters is bit-identical.
pub fn generate_turbulence_box(id: u64, inflow: &InflowConfig) -> TurbulenceBox {
    let (nx, ny, nz) = (inflow.box_nx, inflow.box_ny, inflow.box_nz);
    let sigma_u = inflow.ti * inflow.ws;
    let sigmas = [sigma_u, SIGMA_V_RATIO * sigma_u, SIGMA_W_RATIO * sigma_u];
    let mut comps: Vec<Vec<f32>> = Vec::with_capacity(3);
    for (c, &sigma) in sigmas.iter().enumerate() {
        if sigma == 0.0 {
            comps.push(vec![0f32; nx * ny * nz]);
        } else {
            let rng = ChaCha8Rng::seed_from_u64(seed::derive(id, &[0x7B0C, c as u64]));
            comps.push(synthesize_component(rng, inflow, sigma));
        }
    }
    let w = comps.pop().unwrap();
    let v = comps.pop().unwrap();
    let u = comps.pop().unwrap();
    TurbulenceBox {
        id,
        nx,
        ny,
        nz,
        dx: inflow.box_dx,
        dy: inflow.box_dy,
        dz: inflow.box_dz,
        sigma_u,
        u,
        v,
        w,
    }
}

/// Spectral synthesis of one fluctuation component with exact sample moments:
/// white noise -> 3-D FFT -> spectral filter -> inverse FFT -> rescale so the
/// stored field has mean exactly 0 and std exactly `sigma`.
fn synthesize_component(mut rng: ChaCha8Rng, inflow: &InflowConfig, sigma: f64) -> Vec<f32> {
    let (nx, ny, nz) = (inflow.box_nx, inflow.box_ny, inflow.box_nz);
    let n = nx * ny * nz;
    let mut field: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(rng.random_range(-1.0..1.0), 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    fft_axis(&mut planner, &mut field, nx, ny, nz, Axis::X, false);
    fft_axis(&mut planner, &mut field, nx, ny, nz, Axis::Y, false);
    fft_axis(&mut planner, &mut field, nx, ny, nz, Axis::Z, false);

    // Shape the spectrum. Wavenumber of FFT bin m along an axis of n nodes
    // spaced d apart: 2*pi*min(m, n-m)/(n*d) — symmetric in m -> n-m so the
    // filter is real-even and the inverse transform stays real.
    let kx_of = |m: usize| 2.0 * std::f64::consts::PI * axis_freq(m, nx) / (nx as f64 * inflow.box_dx);
    let ky_of = |m: usize| 2.0 * std::f64::consts::PI * axis_freq(m, ny) / (ny as f64 * inflow.box_dy);
    let kz_of = |m: usize| 2.0 * std::f64::consts::PI * axis_freq(m, nz) / (nz as f64 * inflow.box_dz);
    let ell2 = inflow.cross_scale * inflow.cross_scale;
    for ix in 0..nx {
        let sx = spectrum_shape(kx_of(ix), inflow.length_scale).sqrt();
        for iy in 0..ny {
            let ky = ky_of(iy);
            for iz in 0..nz {
                let kz = kz_of(iz);
                let transverse = (-(ky * ky + kz * kz) * ell2 / 2.0).exp();
                let i = (ix * ny + iy) * nz + iz;
                field[i] *= sx * transverse;
            }
        }
    }
    // Zero the DC bin: the stored field then has (numerically) zero mean.
    field[0] = Complex::new(0.0, 0.0);

    fft_axis(&mut planner, &mut field, nx, ny, nz, Axis::X, true);
    fft_axis(&mut planner, &mut field, nx, ny, nz, Axis::Y, true);
    fft_axis(&mut planner, &mut field, nx, ny, nz, Axis::Z, true);

    // Empirical moment fix: subtract the (tiny) residual mean, scale the
    // sample std to sigma exactly.
    let nf = n as f64;
    let mean = field.iter().map(|c| c.re).sum::<f64>() / nf;
    let var = field.iter().map(|c| (c.re - mean).powi(2)).sum::<f64>() / nf;
    let gain = sigma / var.sqrt().max(f64::MIN_POSITIVE);
    field.iter().map(|c| ((c.re - mean) * gain) as f32).collect()
}

#[inline]
fn axis_freq(m: usize, n: usize) -> f64 {
    m.min(n - m) as f64
}

enum Axis {
    X,
    Y,
    Z,
}

/// In-place FFT along one axis of an x-major (x, y, z) lattice.
fn fft_axis(
    planner: &mut FftPlanner<f64>,
    data: &mut [Complex<f64>],
    nx: usize,
    ny: usize,
    nz: usize,
    axis: Axis,
    inverse: bool,
) {
    let (len, stride, lines): (usize, usize, Vec<usize>) = match axis {
        Axis::X => {
            let starts = (0..ny * nz).collect();
            (nx, ny * nz, starts)
        }
        Axis::Y => {
            let mut starts = Vec::with_capacity(nx * nz);
            for ix in 0..nx {
                for iz in 0..nz {
                    starts.push(ix * ny * nz + iz);
                }
            }
            (ny, nz, starts)
        }
        Axis::Z => {
            let starts = (0..nx * ny).map(|i| i * nz).collect();
            (nz, 1, starts)
        }
    };
    let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
    let norm = if inverse { 1.0 / len as f64 } else { 1.0 };
    let mut line = vec![Complex::new(0.0, 0.0); len];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for start in lines {
        for (j, slot) in line.iter_mut().enumerate() {
            *slot = data[start + j * stride];
        }
        fft.process_with_scratch(&mut line, &mut scratch);
        for (j, val) in line.iter().enumerate() {
            data[start + j * stride] = *val * norm;
        }
    }
}

/// Taylor frozen-turbulence inflow sample: mean wind plus the stored
/// fluctuation advected by `ws * t`, at a world-frame point (x downstream,
/// y lateral, z height).
pub fn freestream_at(tbox: &TurbulenceBox, ws: f64, t: f64, point: [f64; 3]) -> [f64; 3] {
    let f = tbox.fluctuation_at(point[0] + ws * t, point[1], point[2]);
    [ws + f[0], f[1], f[2]]
}
