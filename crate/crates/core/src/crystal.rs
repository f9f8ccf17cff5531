//! Host-material constants and stochastic dopant placement.
//!
//! Ensembles are homogeneous Poisson point processes inside a cubic box with
//! a dedicated readout ion pinned at the center; open boundaries mean the
//! box must be chosen large against the interaction range. Generation is
//! deterministic given a seed, and ensembles are immutable once built.

use rand::Rng;
use rand_distr::{Distribution, Poisson, Uniform};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::trial_rng;
use crate::spatial::UniformGrid;

/// Host crystal description. Frequencies are in the units the fields name;
/// the density is cations per nm³.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HostMaterial {
    pub name: String,
    /// Substitutable cation density ρ in nm⁻³. The default is calibrated so
    /// a 1% doping gives a 1.7 nm mean nearest-neighbor distance.
    pub cation_density_per_nm3: f64,
    pub optical_t2_s: f64,
    /// Half-width of the spectral channel blocked by one qubit, MHz.
    pub hyperfine_spread_mhz: f64,
    /// Separation of the other internal levels, MHz.
    pub level_spacing_mhz: f64,
    /// Addressable inhomogeneous window W, GHz.
    pub addressable_width_ghz: f64,
}

impl Default for HostMaterial {
    fn default() -> Self {
        HostMaterial {
            name: "eu_yso".into(),
            cation_density_per_nm3: 3.46,
            optical_t2_s: 1.5e-3,
            hyperfine_spread_mhz: 850.0,
            level_spacing_mhz: 100.0,
            addressable_width_ghz: 100.0,
        }
    }
}

impl HostMaterial {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("cation density", self.cation_density_per_nm3),
            ("optical T2", self.optical_t2_s),
            ("hyperfine spread", self.hyperfine_spread_mhz),
            ("level spacing", self.level_spacing_mhz),
            ("addressable width", self.addressable_width_ghz),
        ];
        for (name, v) in fields {
            if !(v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Qubit,
    Readout,
    Spectator,
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::Qubit => "qubit",
            Species::Readout => "readout",
            Species::Spectator => "spectator",
        })
    }
}

impl FromStr for Species {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qubit" => Ok(Species::Qubit),
            "readout" => Ok(Species::Readout),
            "spectator" => Ok(Species::Spectator),
            other => Err(Error::domain(format!("unknown species `{other}`"))),
        }
    }
}

/// One dopant ion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dopant {
    pub id: u32,
    pub position_nm: [f64; 3],
    pub species: Species,
    /// Optical resonance offset inside the addressable window, GHz.
    pub resonance_offset_ghz: f64,
}

/// An immutable set of dopants in a cubic box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DopantEnsemble {
    pub box_edge_nm: f64,
    pub concentration: f64,
    pub cation_density_per_nm3: f64,
    pub seed: u64,
    pub dopants: Vec<Dopant>,
}

impl DopantEnsemble {
    /// Builds an ensemble from explicit dopants, validating ids and bounds.
    pub fn from_dopants(
        box_edge_nm: f64,
        concentration: f64,
        cation_density_per_nm3: f64,
        seed: u64,
        dopants: Vec<Dopant>,
    ) -> Result<Self> {
        if !(box_edge_nm > 0.0) {
            return Err(Error::domain("box edge must be positive"));
        }
        let mut ids: Vec<u32> = dopants.iter().map(|d| d.id).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != dopants.len() {
            return Err(Error::domain("dopant ids must be unique"));
        }
        for d in &dopants {
            if d.position_nm
                .iter()
                .any(|&c| !(0.0..=box_edge_nm).contains(&c))
            {
                return Err(Error::domain(format!(
                    "dopant {} lies outside the box",
                    d.id
                )));
            }
            if !(d.resonance_offset_ghz >= 0.0) {
                return Err(Error::domain("resonance offsets must be non-negative"));
            }
        }
        Ok(DopantEnsemble {
            box_edge_nm,
            concentration,
            cation_density_per_nm3,
            seed,
            dopants,
        })
    }

    /// The dedicated readout ion, if present.
    pub fn readout(&self) -> Option<&Dopant> {
        self.dopants.iter().find(|d| d.species == Species::Readout)
    }

    pub fn qubit_count(&self) -> usize {
        self.dopants
            .iter()
            .filter(|d| d.species == Species::Qubit)
            .count()
    }

    /// Dopant intensity (ions per nm³) implied by concentration and host.
    pub fn intensity_per_nm3(&self) -> f64 {
        self.concentration * self.cation_density_per_nm3
    }
}

/// Draws a homogeneous Poisson ensemble of qubit-species dopants at
/// `concentration` (atomic fraction), plus one readout ion at the box
/// center. Deterministic given `seed`.
pub fn place_dopants(
    host: &HostMaterial,
    concentration: f64,
    box_edge_nm: f64,
    seed: u64,
) -> Result<DopantEnsemble> {
    host.validate()?;
    if !(0.0..=1.0).contains(&concentration) {
        return Err(Error::domain("concentration must be in [0, 1]"));
    }
    if !(box_edge_nm > 0.0) {
        return Err(Error::domain("box edge must be positive"));
    }
    let mut rng = trial_rng(seed, 0);
    let lambda = concentration * host.cation_density_per_nm3 * box_edge_nm.powi(3);
    let count = if lambda > 0.0 {
        Poisson::new(lambda)
            .map_err(|e| Error::domain(format!("invalid Poisson intensity: {e}")))?
            .sample(&mut rng) as u64
    } else {
        0
    };
    let center = box_edge_nm / 2.0;
    let mut dopants = Vec::with_capacity(count as usize + 1);
    dopants.push(Dopant {
        id: 0,
        position_nm: [center; 3],
        species: Species::Readout,
        resonance_offset_ghz: 0.0,
    });
    let coord = Uniform::new(0.0, box_edge_nm)
        .map_err(|e| Error::domain(format!("invalid box: {e}")))?;
    for i in 0..count {
        dopants.push(Dopant {
            id: i as u32 + 1,
            position_nm: [
                coord.sample(&mut rng),
                coord.sample(&mut rng),
                coord.sample(&mut rng),
            ],
            species: Species::Qubit,
            resonance_offset_ghz: 0.0,
        });
    }
    DopantEnsemble::from_dopants(
        box_edge_nm,
        concentration,
        host.cation_density_per_nm3,
        seed,
        dopants,
    )
}

/// Assigns each qubit-species dopant an independent uniform resonance offset
/// on `[0, W)`. Deterministic given `seed`; other species keep their offsets.
pub fn assign_frequencies(
    mut ensemble: DopantEnsemble,
    host: &HostMaterial,
    seed: u64,
) -> DopantEnsemble {
    let mut rng = trial_rng(seed, 1);
    let width = host.addressable_width_ghz;
    for d in &mut ensemble.dopants {
        if d.species == Species::Qubit {
            d.resonance_offset_ghz = rng.random::<f64>() * width;
        }
    }
    ensemble
}

#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub bin_width_nm: f64,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct NearestNeighborStats {
    pub mean_nm: f64,
    pub median_nm: f64,
    pub histogram: Histogram,
}

/// Exact nearest-neighbor distance statistics over all dopants. For Poisson
/// input the mean approaches 0.554·n^(−1/3) at intensity n.
pub fn nearest_neighbor_stats(ensemble: &DopantEnsemble) -> Result<NearestNeighborStats> {
    let n = ensemble.dopants.len();
    if n < 2 {
        return Err(Error::domain(
            "nearest-neighbor statistics need at least two dopants",
        ));
    }
    let positions: Vec<[f64; 3]> = ensemble.dopants.iter().map(|d| d.position_nm).collect();
    // Cell edge near the expected spacing keeps the shell search short.
    let spacing_guess = ensemble.box_edge_nm / (n as f64).cbrt();
    let grid = UniformGrid::build(&positions, ensemble.box_edge_nm, spacing_guess);
    let mut distances: Vec<f64> = (0..n)
        .map(|i| grid.nearest_neighbor_distance(i).expect("n >= 2"))
        .collect();
    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = distances.iter().sum::<f64>() / n as f64;
    let median = if n % 2 == 0 {
        0.5 * (distances[n / 2 - 1] + distances[n / 2])
    } else {
        distances[n / 2]
    };
    let max = *distances.last().unwrap();
    let bins = 20usize;
    let bin_width = if max > 0.0 { max / bins as f64 } else { 1.0 };
    let mut counts = vec![0u64; bins];
    for &d in &distances {
        let idx = ((d / bin_width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(NearestNeighborStats {
        mean_nm: mean,
        median_nm: median,
        histogram: Histogram {
            bin_width_nm: bin_width,
            counts,
        },
    })
}

/// Expected dopant count in `volume` μm³ at the given doping fraction.
pub fn ions_in_volume(concentration: f64, host: &HostMaterial, volume_um3: f64) -> Result<f64> {
    if !(volume_um3 >= 0.0) {
        return Err(Error::domain("volume must be non-negative"));
    }
    if !(0.0..=1.0).contains(&concentration) {
        return Err(Error::domain("concentration must be in [0, 1]"));
    }
    const NM3_PER_UM3: f64 = 1e9;
    Ok(concentration * host.cation_density_per_nm3 * volume_um3 * NM3_PER_UM3)
}

/// Writes the line-oriented ensemble format: a header with the generation
/// parameters, then `id x y z species offset` per dopant (nm and GHz, six
/// decimals).
pub fn write_ensemble(ensemble: &DopantEnsemble, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(
        w,
        "# ensemble seed={} concentration={:.6} box_edge={:.6} density={:.6}",
        ensemble.seed,
        ensemble.concentration,
        ensemble.box_edge_nm,
        ensemble.cation_density_per_nm3
    )?;
    for d in &ensemble.dopants {
        writeln!(
            w,
            "{} {:.6} {:.6} {:.6} {} {:.6}",
            d.id,
            d.position_nm[0],
            d.position_nm[1],
            d.position_nm[2],
            d.species,
            d.resonance_offset_ghz
        )?;
    }
    Ok(())
}

/// Parses the format written by [`write_ensemble`].
pub fn read_ensemble(reader: impl BufRead) -> Result<DopantEnsemble> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty ensemble file"))?;
    let header = header?;
    let mut seed = None;
    let mut concentration = None;
    let mut box_edge = None;
    let mut density = None;
    if !header.starts_with("# ensemble") {
        return Err(Error::parse(1, "missing `# ensemble` header"));
    }
    for field in header.trim_start_matches("# ensemble").split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(1, format!("malformed header field `{field}`")))?;
        match key {
            "seed" => seed = Some(parse_num::<u64>(1, value)?),
            "concentration" => concentration = Some(parse_num::<f64>(1, value)?),
            "box_edge" => box_edge = Some(parse_num::<f64>(1, value)?),
            "density" => density = Some(parse_num::<f64>(1, value)?),
            other => return Err(Error::parse(1, format!("unknown header key `{other}`"))),
        }
    }
    let (seed, concentration, box_edge, density) = match (seed, concentration, box_edge, density)
    {
        (Some(s), Some(c), Some(b), Some(d)) => (s, c, b, d),
        _ => return Err(Error::parse(1, "incomplete ensemble header")),
    };
    let mut dopants = Vec::new();
    for (lineno, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 6 {
            return Err(Error::parse(lineno + 1, "expected 6 fields per record"));
        }
        dopants.push(Dopant {
            id: parse_num(lineno + 1, parts[0])?,
            position_nm: [
                parse_num(lineno + 1, parts[1])?,
                parse_num(lineno + 1, parts[2])?,
                parse_num(lineno + 1, parts[3])?,
            ],
            species: parts[4].parse()?,
            resonance_offset_ghz: parse_num(lineno + 1, parts[5])?,
        });
    }
    DopantEnsemble::from_dopants(box_edge, concentration, density, seed, dopants)
}

fn parse_num<T: FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid number `{s}`")))
}
