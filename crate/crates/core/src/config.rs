//! Initial mass configurations, exponential clocks and reproducible random streams.
//!
//! Every other module consumes a [`RankedConfig`]: the masses listed in the
//! order of their clocks (the size-biased order), together with the sorted
//! clocks and mass prefix sums. All "does vertex `r` get heard" questions are
//! answered by [`RankedConfig::hear_time`], so that the per-`q` sweep and the
//! event-driven engine agree bit for bit.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite vector of strictly positive masses. The position of a mass is the label of its vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightedConfig {
    masses: Vec<f64>,
}

impl WeightedConfig {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::EmptyConfig);
        }
        if let Some((index, &value)) = masses
            .iter()
            .enumerate()
            .find(|(_, m)| !(m.is_finite() && **m > 0.0))
        {
            return Err(Error::InvalidMass { index, value });
        }
        Ok(Self { masses })
    }

    /// `n` vertices of mass `mass` each.
    pub fn uniform(n: usize, mass: f64) -> Result<Self> {
        Self::new(vec![mass; n])
    }

    /// The near-critical Erdős–Rényi sequence `x_i = n^{-2/3}`.
    pub fn critical_uniform(n: usize) -> Result<Self> {
        Self::uniform(n, (n as f64).powf(-2.0 / 3.0))
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// Power sum `sum_i x_i^r` for `r` in `{1, 2, 3}`.
    pub fn sigma(&self, r: u32) -> Result<f64> {
        if !(1..=3).contains(&r) {
            return Err(Error::InvalidPower(r));
        }
        Ok(neumaier_sum(self.masses.iter().map(|x| x.powi(r as i32))))
    }
}

impl TryFrom<Vec<f64>> for WeightedConfig {
    type Error = Error;

    fn try_from(masses: Vec<f64>) -> Result<Self> {
        Self::new(masses)
    }
}

impl From<WeightedConfig> for Vec<f64> {
    fn from(c: WeightedConfig) -> Self {
        c.masses
    }
}

/// Free-function form of [`WeightedConfig::sigma`].
pub fn sigma(config: &WeightedConfig, r: u32) -> Result<f64> {
    config.sigma(r)
}

/// Named purposes for random streams. Each purpose gets its own block of stream ids so
/// that, for example, static and dynamic surplus never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamPurpose {
    Clocks = 1,
    MergeEdges = 2,
    StaticSurplus = 3,
    DynamicSurplus = 4,
    Oracle = 5,
    LimitDriver = 6,
    LimitMarks = 7,
    Fixtures = 8,
}

/// An addressable random stream: a ChaCha8 generator keyed by `seed` with word stream `stream_id`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Stream for `purpose` within replication `rep`.
    pub fn for_purpose(seed: u64, purpose: StreamPurpose, rep: u64) -> Self {
        debug_assert!(rep < (1 << 48));
        Self::new(seed, ((purpose as u64) << 48) | rep)
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Exponential clocks `xi[i] ~ Exp(x_i)` and the permutation sorting them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClockAssignment {
    /// Clock of each vertex, indexed by vertex label.
    pub xi: Vec<f64>,
    /// `perm[r]` is the vertex with the `r`-th smallest clock (0-based rank).
    pub perm: Vec<usize>,
    /// `inv_perm[v]` is the rank of vertex `v`.
    pub inv_perm: Vec<usize>,
}

impl ClockAssignment {
    /// Build from given clock values; ties are broken by vertex index.
    pub fn from_xi(config: &WeightedConfig, xi: Vec<f64>) -> Result<Self> {
        if xi.len() != config.len() {
            return Err(Error::ClockLength {
                expected: config.len(),
                got: xi.len(),
            });
        }
        if let Some((index, &value)) = xi
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidClock { index, value });
        }
        let mut perm: Vec<usize> = (0..xi.len()).collect();
        perm.sort_by(|&a, &b| xi[a].total_cmp(&xi[b]).then(a.cmp(&b)));
        let mut inv_perm = vec![0; perm.len()];
        for (rank, &v) in perm.iter().enumerate() {
            inv_perm[v] = rank;
        }
        Ok(Self { xi, perm, inv_perm })
    }

    /// Order statistics `xi_(1) <= xi_(2) <= ...`.
    pub fn sorted(&self) -> Vec<f64> {
        self.perm.iter().map(|&v| self.xi[v]).collect()
    }
}

/// Draw independent clocks `xi[i] ~ Exp(x_i)`.
pub fn sample_clocks(config: &WeightedConfig, stream: RngStream) -> ClockAssignment {
    let mut rng = stream.rng();
    sample_clocks_with(config, &mut rng)
}

pub fn sample_clocks_with<R: Rng + ?Sized>(config: &WeightedConfig, rng: &mut R) -> ClockAssignment {
    let xi = config
        .masses()
        .iter()
        .map(|&x| Exp::new(x).expect("positive rate").sample(rng))
        .collect();
    ClockAssignment::from_xi(config, xi).expect("exponential samples are finite")
}

/// Masses and clocks listed in size-biased (clock) order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedConfig {
    /// Vertex label at each rank.
    pub vertex: Vec<usize>,
    /// `x_{pi_r}`.
    pub mass: Vec<f64>,
    /// `xi_(r)`.
    pub clock: Vec<f64>,
    /// `prefix[r] = mass[0] + ... + mass[r-1]`; length `len + 1`.
    pub prefix: Vec<f64>,
}

impl RankedConfig {
    pub fn new(config: &WeightedConfig, clocks: &ClockAssignment) -> Self {
        let vertex = clocks.perm.clone();
        let mass: Vec<f64> = vertex.iter().map(|&v| config.masses()[v]).collect();
        let clock: Vec<f64> = vertex.iter().map(|&v| clocks.xi[v]).collect();
        Self::from_ranked(vertex, mass, clock)
    }

    /// Build directly from ranked data. `clock` must be nondecreasing.
    pub fn from_ranked(vertex: Vec<usize>, mass: Vec<f64>, clock: Vec<f64>) -> Self {
        debug_assert!(clock.windows(2).all(|w| w[0] <= w[1]));
        let mut prefix = Vec::with_capacity(mass.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &m in &mass {
            acc += m;
            prefix.push(acc);
        }
        Self {
            vertex,
            mass,
            clock,
            prefix,
        }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    /// Total mass of ranks `first..=last`.
    pub fn block_mass(&self, first: usize, last: usize) -> f64 {
        self.prefix[last + 1] - self.prefix[first]
    }

    /// The coalescent time from which rank `r` lies inside the listening interval of
    /// `root` after ranks `root..=through` were listed, i.e. the least `q` with
    /// `xi_(r)/q <= xi_(root)/q + x_root + ... + x_through`.
    pub fn hear_time(&self, root: usize, through: usize, r: usize) -> f64 {
        (self.clock[r] - self.clock[root]) / self.block_mass(root, through)
    }

    /// Whether rank `r` is heard by `root` through `through` at time `q`.
    pub fn heard(&self, root: usize, through: usize, r: usize, q: f64) -> bool {
        self.hear_time(root, through, r) <= q
    }

    pub fn total_mass(&self) -> f64 {
        self.prefix[self.len()]
    }

    /// Reconstruct the unranked configuration and clocks.
    pub fn unrank(&self) -> (WeightedConfig, ClockAssignment) {
        let n = self.len();
        let mut masses = vec![0.0; n];
        let mut xi = vec![0.0; n];
        for r in 0..n {
            masses[self.vertex[r]] = self.mass[r];
            xi[self.vertex[r]] = self.clock[r];
        }
        let config = WeightedConfig::new(masses).expect("ranked masses are positive");
        let clocks = ClockAssignment::from_xi(&config, xi).expect("ranked clocks are valid");
        (config, clocks)
    }
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
