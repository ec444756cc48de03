//! Seeded instance generators.
//!
//! Every trial draws from its own ChaCha8 stream derived from
//! `(master seed, trial index, label)`, so instances do not depend on the
//! order in which trials are evaluated.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::constructions::{CommutingPairInstance, Lemma1Inputs};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::{MAX_DIM, MAX_PAIRS};

/// Shape of the eigenvalue (or diagonal weight) vectors drawn for an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumProfile {
    /// Independent draws from `[0, 1]`.
    Uniform,
    /// `exp(−rate·i)` with `rate ∈ [0.5, 4]`, in shuffled order.
    ExpDecay,
    /// At most `r` nonzero entries, and always at least one zero.
    RankDeficient(usize),
    /// Entries take one of two levels.
    Repeated,
    /// `10^u` with `u ∈ [−6, 6]`.
    Extreme,
}

impl SpectrumProfile {
    pub const ALL: [SpectrumProfile; 5] = [
        SpectrumProfile::Uniform,
        SpectrumProfile::ExpDecay,
        SpectrumProfile::RankDeficient(1),
        SpectrumProfile::Repeated,
        SpectrumProfile::Extreme,
    ];

    pub fn name(&self) -> String {
        match self {
            SpectrumProfile::Uniform => "uniform".into(),
            SpectrumProfile::ExpDecay => "exp-decay".into(),
            SpectrumProfile::RankDeficient(r) => format!("rank-deficient:{r}"),
            SpectrumProfile::Repeated => "repeated".into(),
            SpectrumProfile::Extreme => "extreme".into(),
        }
    }

    /// Draws `n` nonnegative values.
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match *self {
            SpectrumProfile::Uniform => (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect(),
            SpectrumProfile::ExpDecay => {
                let rate = rng.gen_range(0.5..=4.0);
                let mut v: Vec<f64> = (0..n).map(|i| (-rate * i as f64).exp()).collect();
                v.shuffle(rng);
                v
            }
            SpectrumProfile::RankDeficient(r) => {
                let rank = r.min(n.saturating_sub(1));
                let mut v: Vec<f64> = (0..n).map(|i| if i < rank { rng.gen_range(0.1..=1.0) } else { 0.0 }).collect();
                v.shuffle(rng);
                v
            }
            SpectrumProfile::Repeated => {
                let levels = [rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0)];
                (0..n).map(|_| levels[rng.gen_range(0..2)]).collect()
            }
            SpectrumProfile::Extreme => (0..n).map(|_| 10f64.powf(rng.gen_range(-6.0..=6.0))).collect(),
        }
    }
}

impl fmt::Display for SpectrumProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for SpectrumProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl FromStr for SpectrumProfile {
    type Err = Error;

    /// Accepts `uniform`, `exp-decay`, `rank-deficient[:r]`, `repeated`, `extreme`.
    fn from_str(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let profile = match head {
            "uniform" => SpectrumProfile::Uniform,
            "exp-decay" => SpectrumProfile::ExpDecay,
            "repeated" => SpectrumProfile::Repeated,
            "extreme" => SpectrumProfile::Extreme,
            "rank-deficient" => {
                let r = match arg {
                    None => 1,
                    Some(a) => a.parse().map_err(|_| Error::Usage(format!("bad rank in profile '{s}'")))?,
                };
                return Ok(SpectrumProfile::RankDeficient(r));
            }
            _ => return Err(Error::Usage(format!("unknown spectrum profile '{s}'"))),
        };
        if arg.is_some() {
            return Err(Error::Usage(format!("profile '{head}' takes no argument")));
        }
        Ok(profile)
    }
}

/// Ranges and profiles for a fuzzing campaign.
#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub dims: RangeInclusive<usize>,
    pub pairs: RangeInclusive<usize>,
    /// Column counts for rectangular lemma inputs.
    pub columns: RangeInclusive<usize>,
    pub profiles: Vec<SpectrumProfile>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig { seed: 42, dims: 1..=6, pairs: 1..=4, columns: 1..=8, profiles: SpectrumProfile::ALL.to_vec() }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, r: &RangeInclusive<usize>, cap: usize| {
            if r.is_empty() || *r.start() == 0 || *r.end() > cap {
                Err(Error::Usage(format!("{name} range {}..{} must lie within 1..{cap}", r.start(), r.end())))
            } else {
                Ok(())
            }
        };
        check("dimension", &self.dims, MAX_DIM)?;
        check("pair-count", &self.pairs, MAX_PAIRS)?;
        check("column", &self.columns, MAX_DIM)?;
        if self.profiles.is_empty() {
            return Err(Error::Usage("at least one spectrum profile is required".into()));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a, used only to fold a label into the stream key.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Independent stream for one `(seed, trial, label)` triple.
pub fn stream(seed: u64, trial: u64, label: &str) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(seed) ^ splitmix64(trial.wrapping_add(0x5851_f42d_4c95_7f2d)) ^ label_hash(label));
    ChaCha8Rng::seed_from_u64(key)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unitary: Gram–Schmidt (applied twice) on a complex
/// Gaussian matrix. Gram–Schmidt leaves a positive diagonal in the implicit
/// triangular factor, which is the phase fixing that makes the law Haar.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    assert!(n >= 1, "random_unitary needs n >= 1");
    let mut cols: Vec<Vec<C64>> = (0..n).map(|_| (0..n).map(|_| gaussian(rng)).collect()).collect();
    for j in 0..n {
        for _ in 0..2 {
            for i in 0..j {
                let proj: C64 = cols[i].iter().zip(&cols[j]).map(|(u, v)| u.conj() * v).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (v, u) in rest[0].iter_mut().zip(&done[i]) {
                    *v -= proj * u;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

fn conjugate_diag(u: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    u.scale_columns(d).and_then(|x| x.matmul(&u.adjoint())).expect("square factors").hermitian_part()
}

/// `U diag(u) U*` with Haar `U` and `u` drawn from `profile`.
pub fn random_psd(n: usize, rng: &mut ChaCha8Rng, profile: SpectrumProfile) -> ComplexMatrix {
    let u = random_unitary(n, rng);
    conjugate_diag(&u, &profile.sample(n, rng))
}

/// `U diag(s) V*` with independent Haar `U`, `V`: a general square matrix whose
/// singular values follow `profile`.
pub fn random_general(n: usize, rng: &mut ChaCha8Rng, profile: SpectrumProfile) -> ComplexMatrix {
    let u = random_unitary(n, rng);
    let s = profile.sample(n, rng);
    let v = random_unitary(n, rng);
    u.scale_columns(&s).and_then(|x| x.matmul(&v.adjoint())).expect("square factors")
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng)).hermitian_part()
}

/// `K` pairs `(U_k diag(a_k) U_k*, U_k diag(b_k) U_k*)` sharing a Haar basis per pair.
pub fn random_commuting_instance(
    k: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
    profile: SpectrumProfile,
) -> Result<CommutingPairInstance> {
    if k == 0 || k > MAX_PAIRS || d == 0 || d > MAX_DIM {
        return Err(Error::Usage(format!("K={k}, d={d} outside 1..{MAX_PAIRS} x 1..{MAX_DIM}")));
    }
    let pairs = (0..k)
        .map(|_| {
            let u = random_unitary(d, rng);
            let a = profile.sample(d, rng);
            let b = profile.sample(d, rng);
            (conjugate_diag(&u, &a), conjugate_diag(&u, &b))
        })
        .collect();
    CommutingPairInstance::from_pairs_unchecked(pairs)
}

/// Complex Gaussian `n×m` frame with profile-distributed `L`, `M`.
pub fn random_lemma1_inputs(
    n: usize,
    m: usize,
    rng: &mut ChaCha8Rng,
    profile: SpectrumProfile,
) -> Result<Lemma1Inputs> {
    if n == 0 || m == 0 || n > MAX_DIM || m > MAX_DIM {
        return Err(Error::Usage(format!("frame shape {n}x{m} outside 1..{MAX_DIM}")));
    }
    let frame = ComplexMatrix::from_fn(n, m, |_, _| gaussian(rng));
    let left = profile.sample(m, rng);
    let right = profile.sample(m, rng);
    Lemma1Inputs::new(frame, left, right)
}

#[derive(Clone, Debug)]
pub enum EdgeInstance {
    Commuting(CommutingPairInstance),
    Lemma1(Lemma1Inputs),
}

#[derive(Clone, Debug)]
pub struct EdgeCase {
    pub name: &'static str,
    pub instance: EdgeInstance,
}

fn pair_instance(pairs: Vec<(ComplexMatrix, ComplexMatrix)>) -> EdgeInstance {
    EdgeInstance::Commuting(CommutingPairInstance::new(pairs).expect("edge instances are valid"))
}

/// Normalized DFT matrix with column phases `e^{2πi·shift·j/n}`.
fn dft_unitary(n: usize, shift: usize) -> ComplexMatrix {
    let tau = 2.0 * std::f64::consts::PI;
    let norm = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |i, j| {
        C64::from_polar(norm, tau * (((i * j) % n) as f64 / n as f64 + (shift * j) as f64 / (n as f64 * 7.0)))
    })
}

/// Fixed, randomness-free instances covering degenerate inputs and the size caps.
pub fn edge_case_suite() -> Vec<EdgeCase> {
    let diag = ComplexMatrix::from_real_diag;
    let ones2 = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).expect("2x2");
    let h3 = ComplexMatrix::from_rows(vec![
        vec![C64::new(2.0, 0.0), C64::new(0.5, 0.5), C64::new(0.0, 0.0)],
        vec![C64::new(0.5, -0.5), C64::new(2.0, 0.0), C64::new(0.0, 0.0)],
        vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
    ])
    .expect("3x3");
    // eigenvalues of h3 are 2 ± 1/√2 and 1; the projector onto its top eigenvector shares that basis
    let u3 = crate::linalg::hermitian_eig(&h3, 1e-12).expect("hermitian").basis;
    let rank_one = conjugate_diag(&u3, &[1.0, 0.0, 0.0]);
    let cap_pairs = (0..MAX_PAIRS)
        .map(|k| {
            let u = dft_unitary(MAX_DIM, k);
            let a: Vec<f64> = (0..MAX_DIM).map(|i| ((i * (k + 3)) % 11) as f64 / 10.0).collect();
            let b: Vec<f64> = (0..MAX_DIM).map(|i| ((i * (k + 5) + 1) % 13) as f64 / 12.0).collect();
            (conjugate_diag(&u, &a), conjugate_diag(&u, &b))
        })
        .collect();
    let unitary2 = ComplexMatrix::from_rows(vec![
        vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)],
        vec![C64::new(0.0, 0.8), C64::new(0.6, 0.0)],
    ])
    .expect("2x2");

    vec![
        EdgeCase {
            name: "zero-pair",
            instance: pair_instance(vec![(ComplexMatrix::zeros(3, 3), ComplexMatrix::zeros(3, 3))]),
        },
        EdgeCase {
            name: "identity-pairs",
            instance: pair_instance(vec![(ComplexMatrix::identity(3), ComplexMatrix::identity(3)); 3]),
        },
        EdgeCase { name: "single-pair", instance: pair_instance(vec![(h3.clone(), rank_one.clone())]) },
        EdgeCase {
            name: "diagonal-only",
            instance: pair_instance(vec![
                (diag(&[3.0, 1.0, 0.0]), diag(&[0.5, 2.0, 1.0])),
                (diag(&[0.0, 2.0, 4.0]), diag(&[1.0, 1.0, 0.25])),
            ]),
        },
        EdgeCase {
            name: "worked-example",
            instance: pair_instance(vec![(diag(&[2.0, 1.0]), diag(&[1.0, 3.0])), (ones2.clone(), ones2.clone())]),
        },
        EdgeCase {
            name: "rank-deficient",
            instance: pair_instance(vec![
                (rank_one.clone(), h3.clone()),
                (diag(&[0.0, 0.0, 1.0]), diag(&[5.0, 0.0, 0.0])),
            ]),
        },
        EdgeCase {
            name: "repeated-eigenvalues",
            instance: pair_instance(vec![
                (ComplexMatrix::identity(3).scaled(2.0), h3.clone()),
                (h3.clone(), h3.clone()),
            ]),
        },
        EdgeCase {
            name: "scale-1e6",
            instance: pair_instance(vec![
                (h3.scaled(1e6), rank_one.scaled(1e-6)),
                (diag(&[1e-6, 1e6, 1.0]), diag(&[1e6, 1e-6, 1.0])),
            ]),
        },
        EdgeCase {
            name: "scale-1e-6",
            instance: pair_instance(vec![
                (h3.scaled(1e-6), rank_one.scaled(1e-6)),
                (diag(&[1e-6, 3e-6, 0.0]), diag(&[2e-6, 1e-6, 5e-6])),
            ]),
        },
        EdgeCase {
            name: "max-cap",
            instance: EdgeInstance::Commuting(
                CommutingPairInstance::from_pairs_unchecked(cap_pairs).expect("within caps"),
            ),
        },
        EdgeCase {
            name: "orthonormal-frame",
            instance: EdgeInstance::Lemma1(
                Lemma1Inputs::new(
                    u3.scale_columns(&[1.0, 1.0, 1.0]).expect("3x3"),
                    vec![2.0, 0.5, 1.0],
                    vec![1.0, 3.0, 0.0],
                )
                .expect("valid"),
            ),
        },
        EdgeCase {
            name: "zero-column-frame",
            instance: EdgeInstance::Lemma1(
                Lemma1Inputs::new(
                    ComplexMatrix::from_real_rows(&[vec![1.0, 0.0, 2.0, 0.5], vec![-1.0, 0.0, 1.0, 3.0]]).expect("2x4"),
                    vec![1.0, 4.0, 0.5, 2.0],
                    vec![2.0, 1.0, 1.0, 0.0],
                )
                .expect("valid"),
            ),
        },
        EdgeCase {
            name: "unitary-frame-unit-weights",
            instance: EdgeInstance::Lemma1(Lemma1Inputs::new(unitary2, vec![1.0; 2], vec![1.0; 2]).expect("valid")),
        },
    ]
}
