//! Polymer building blocks, the probability space of sign configurations,
//! and assembly of the hopping/potential sequences of the random operator.
//!
//! A configuration is a two-sided sequence of signs together with an origin
//! offset `l`: site 0 of the chain carries entry `l` of the polymer at sign
//! index 0. The measure weights the pair (sign at 0, offset) with
//! `p_sign / <L>` per cell, all other signs are i.i.d. Bernoulli.

use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Which of the two polymer species occupies a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// One building block: hopping and potential values over `len` sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Polymer {
    hopping: Vec<f64>,
    potential: Vec<f64>,
}

impl Polymer {
    pub fn new(hopping: Vec<f64>, potential: Vec<f64>) -> Result<Self> {
        if hopping.len() != potential.len() || hopping.is_empty() {
            return Err(Error::LengthMismatch {
                t: hopping.len(),
                v: potential.len(),
            });
        }
        for &t in &hopping {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::NonPositiveHopping(t));
            }
        }
        Ok(Self { hopping, potential })
    }

    pub fn len(&self) -> usize {
        self.hopping.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty blocks
    }

    pub fn hopping(&self) -> &[f64] {
        &self.hopping
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }
}

/// The two species together with the Bernoulli weight of the plus block.
#[derive(Debug, Clone, PartialEq)]
pub struct PolymerEnsemble {
    plus: Polymer,
    minus: Polymer,
    p_plus: f64,
}

/// Validated constructor; rejects empty polymers, non-positive hoppings and
/// probabilities outside [0, 1].
pub fn build_ensemble(plus: Polymer, minus: Polymer, p_plus: f64) -> Result<PolymerEnsemble> {
    if !(0.0..=1.0).contains(&p_plus) || !p_plus.is_finite() {
        return Err(Error::InvalidProbability(p_plus));
    }
    Ok(PolymerEnsemble { plus, minus, p_plus })
}

impl PolymerEnsemble {
    pub fn polymer(&self, sign: Sign) -> &Polymer {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn p_minus(&self) -> f64 {
        1.0 - self.p_plus
    }

    pub fn prob(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Plus => self.p_plus(),
            Sign::Minus => self.p_minus(),
        }
    }

    /// Mean block length `<L> = p+ L+ + p- L-`.
    pub fn mean_length(&self) -> f64 {
        self.p_plus * self.plus.len() as f64 + self.p_minus() * self.minus.len() as f64
    }

    /// `p+ c+ + p- c-` for any pair of per-species values.
    pub fn average(&self, c_plus: f64, c_minus: f64) -> f64 {
        self.p_plus * c_plus + self.p_minus() * c_minus
    }

    pub fn max_length(&self) -> usize {
        self.plus.len().max(self.minus.len())
    }
}

fn zigzag(k: i64) -> u64 {
    if k >= 0 {
        2 * k as u64
    } else {
        2 * (-(k + 1)) as u64 + 1
    }
}

/// Counter-based draw: stream `2*sample` of the master seed holds the sign
/// sequence (word position indexed by the zig-zagged block index), stream
/// `2*sample + 1` holds the origin offset. Every value is a pure function of
/// `(seed, sample, index)`, so extension in either direction and parallel
/// sampling are order-independent.
fn sign_at(seed: u64, sample: u64, k: i64, p_plus: f64) -> Sign {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * sample);
    rng.set_word_pos(2 * zigzag(k) as u128);
    if rng.random::<f64>() < p_plus {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn origin_at(seed: u64, sample: u64, ensemble: &PolymerEnsemble) -> (Sign, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2 * sample + 1);
    let u: f64 = rng.random();
    // Cell (sign, l) has weight p_sign / <L>; cells are laid out plus-first.
    let mean_len = ensemble.mean_length();
    let w_plus = ensemble.p_plus() / mean_len;
    let l_plus = ensemble.polymer(Sign::Plus).len();
    let plus_mass = w_plus * l_plus as f64;
    if u < plus_mass {
        let l = ((u / w_plus) as usize).min(l_plus - 1);
        (Sign::Plus, l)
    } else {
        let w_minus = ensemble.p_minus() / mean_len;
        let l_minus = ensemble.polymer(Sign::Minus).len();
        let l = (((u - plus_mass) / w_minus) as usize).min(l_minus - 1);
        (Sign::Minus, l)
    }
}

/// A sampled sign configuration over block indices `[k_min, k_max]` with its
/// origin offset. Signs outside the sampled range raise
/// `InsufficientConfiguration` instead of silently extending.
#[derive(Debug, Clone)]
pub struct Configuration {
    seed: u64,
    sample: u64,
    k_min: i64,
    k_max: i64,
    signs: Vec<Sign>,
    offset: usize,
}

/// Single-stream variant of [`sample_configuration_indexed`] (sample index 0).
pub fn sample_configuration(
    ensemble: &PolymerEnsemble,
    k_min: i64,
    k_max: i64,
    seed: u64,
) -> Result<Configuration> {
    sample_configuration_indexed(ensemble, k_min, k_max, seed, 0)
}

/// Draws the configuration of the disorder sample `sample` from the master
/// seed. Identical `(seed, sample)` reproduce identical configurations.
pub fn sample_configuration_indexed(
    ensemble: &PolymerEnsemble,
    k_min: i64,
    k_max: i64,
    seed: u64,
    sample: u64,
) -> Result<Configuration> {
    if k_min > 0 || k_max < 0 {
        return Err(Error::EmptyWindow { k_min, k_max });
    }
    let (sign0, offset) = origin_at(seed, sample, ensemble);
    let mut signs = Vec::with_capacity((k_max - k_min + 1) as usize);
    for k in k_min..=k_max {
        if k == 0 {
            signs.push(sign0);
        } else {
            signs.push(sign_at(seed, sample, k, ensemble.p_plus()));
        }
    }
    Ok(Configuration {
        seed,
        sample,
        k_min,
        k_max,
        signs,
        offset,
    })
}

impl Configuration {
    pub fn sign(&self, k: i64) -> Result<Sign> {
        if k < self.k_min || k > self.k_max {
            return Err(Error::InsufficientConfiguration(k));
        }
        Ok(self.signs[(k - self.k_min) as usize])
    }

    /// Offset `l` of site 0 inside block 0.
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_max
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Re-derives the configuration over a larger block range; values on the
    /// shared range are bit-identical.
    pub fn extended(&self, ensemble: &PolymerEnsemble, k_min: i64, k_max: i64) -> Result<Self> {
        sample_configuration_indexed(
            ensemble,
            k_min.min(self.k_min),
            k_max.max(self.k_max),
            self.seed,
            self.sample,
        )
    }

    /// Signs of blocks `0..n` (the forward chain used by phase iterations).
    pub fn forward_signs(&self, n: usize) -> Result<&[Sign]> {
        if self.k_max < n as i64 - 1 {
            return Err(Error::InsufficientConfiguration(n as i64 - 1));
        }
        let base = (-self.k_min) as usize;
        Ok(&self.signs[base..base + n])
    }
}

/// Concatenated hopping/potential arrays over a site window, with the block
/// start positions ("nodes") that fall inside it.
#[derive(Debug, Clone)]
pub struct JacobiWindow {
    n_min: i64,
    t: Vec<f64>,
    v: Vec<f64>,
    node_positions: Vec<i64>,
}

impl JacobiWindow {
    /// Direct constructor for hand-built chains (tests, free chains).
    pub fn from_arrays(n_min: i64, t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() {
            return Err(Error::LengthMismatch { t: t.len(), v: v.len() });
        }
        for &h in &t {
            if !(h > 0.0) {
                return Err(Error::NonPositiveHopping(h));
            }
        }
        Ok(Self {
            n_min,
            t,
            v,
            node_positions: Vec::new(),
        })
    }

    /// Constant chain `t(n) = t`, `v(n) = v` over `[n_min, n_max]`.
    pub fn uniform(n_min: i64, n_max: i64, t: f64, v: f64) -> Result<Self> {
        let len = (n_max - n_min + 1) as usize;
        Self::from_arrays(n_min, vec![t; len], vec![v; len])
    }

    pub fn n_min(&self) -> i64 {
        self.n_min
    }

    pub fn n_max(&self) -> i64 {
        self.n_min + self.t.len() as i64 - 1
    }

    pub fn t(&self, n: i64) -> Result<f64> {
        self.get(&self.t, n)
    }

    pub fn v(&self, n: i64) -> Result<f64> {
        self.get(&self.v, n)
    }

    fn get(&self, arr: &[f64], n: i64) -> Result<f64> {
        if n < self.n_min || n > self.n_max() {
            return Err(Error::InsufficientWindow(n));
        }
        Ok(arr[(n - self.n_min) as usize])
    }

    pub fn node_positions(&self) -> &[i64] {
        &self.node_positions
    }

    /// Restriction to `[a, b]`; equals the direct assembly of the sub-window.
    pub fn sub_window(&self, a: i64, b: i64) -> Result<Self> {
        if a < self.n_min || b > self.n_max() || a > b {
            return Err(Error::InsufficientWindow(if a < self.n_min { a } else { b }));
        }
        let lo = (a - self.n_min) as usize;
        let hi = (b - self.n_min) as usize;
        Ok(Self {
            n_min: a,
            t: self.t[lo..=hi].to_vec(),
            v: self.v[lo..=hi].to_vec(),
            node_positions: self
                .node_positions
                .iter()
                .copied()
                .filter(|&n| n >= a && n <= b)
                .collect(),
        })
    }

    /// Dirichlet restriction to sites `0..n`: diagonal `v(0..n)`, off-diagonal
    /// `-t(1..n)`.
    pub fn tridiagonal(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n {
            diag.push(self.v(k as i64)?);
        }
        for k in 1..n {
            off.push(-self.t(k as i64)?);
        }
        Ok((diag, off))
    }

    /// Gershgorin bracket of the Dirichlet restriction to sites `0..n`.
    pub fn gershgorin(&self, n: usize) -> Result<(f64, f64)> {
        let (diag, off) = self.tridiagonal(n)?;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { off[i].abs() } else { 0.0 };
            lo = lo.min(diag[i] - left - right);
            hi = hi.max(diag[i] + left + right);
        }
        Ok((lo, hi))
    }
}

/// Lays out the chain of `config` over sites `[n_min, n_max]`. Site 0 carries
/// entry `offset` of block 0; block k starts at node `n_k` with
/// `n_{k+1} = n_k + L_{sign_k}`.
pub fn assemble_window(
    config: &Configuration,
    ensemble: &PolymerEnsemble,
    n_min: i64,
    n_max: i64,
) -> Result<JacobiWindow> {
    assert!(n_min <= n_max, "empty site window");
    // Find the block containing n_min by walking from block 0.
    let mut k: i64 = 0;
    let mut node: i64 = -(config.offset() as i64);
    while node > n_min {
        k -= 1;
        node -= ensemble.polymer(config.sign(k)?).len() as i64;
    }
    loop {
        let len = ensemble.polymer(config.sign(k)?).len() as i64;
        if node + len > n_min {
            break;
        }
        node += len;
        k += 1;
    }
    let size = (n_max - n_min + 1) as usize;
    let mut t = Vec::with_capacity(size);
    let mut v = Vec::with_capacity(size);
    let mut node_positions = Vec::new();
    let mut pos = node;
    while pos <= n_max {
        let p = ensemble.polymer(config.sign(k)?);
        if pos >= n_min {
            node_positions.push(pos);
        }
        for j in 0..p.len() {
            let site = pos + j as i64;
            if site < n_min {
                continue;
            }
            if site > n_max {
                break;
            }
            t.push(p.hopping()[j]);
            v.push(p.potential()[j]);
        }
        pos += p.len() as i64;
        k += 1;
    }
    Ok(JacobiWindow {
        n_min,
        t,
        v,
        node_positions,
    })
}

/// Node position of block `k` (site of the block's entry 0).
pub fn node_position(config: &Configuration, ensemble: &PolymerEnsemble, k: i64) -> Result<i64> {
    let mut node: i64 = -(config.offset() as i64);
    if k >= 0 {
        for j in 0..k {
            node += ensemble.polymer(config.sign(j)?).len() as i64;
        }
    } else {
        for j in (k..0).rev() {
            node -= ensemble.polymer(config.sign(j)?).len() as i64;
        }
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn dimer(lambda: f64) -> PolymerEnsemble {
        build_ensemble(
            Polymer::new(vec![1.0, 1.0], vec![lambda, lambda]).unwrap(),
            Polymer::new(vec![1.0, 1.0], vec![-lambda, -lambda]).unwrap(),
            0.5,
        )
        .unwrap()
    }

    #[test]
    fn ensemble_validation() {
        // the two spec examples of valid ensembles
        dimer(0.5);
        let e = build_ensemble(
            Polymer::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap(),
            Polymer::new(vec![1.0], vec![0.7]).unwrap(),
            0.5,
        )
        .unwrap();
        assert_eq!(e.polymer(Sign::Plus).len(), 2);
        assert_eq!(e.polymer(Sign::Minus).len(), 1);
        assert!((e.mean_length() - 1.5).abs() < 1e-15);

        assert!(matches!(
            Polymer::new(vec![0.0, 1.0], vec![0.0, 0.0]),
            Err(Error::NonPositiveHopping(_))
        ));
        assert!(matches!(
            Polymer::new(vec![1.0], vec![0.0, 0.0]),
            Err(Error::LengthMismatch { .. })
        ));
        let p = Polymer::new(vec![1.0], vec![0.0]).unwrap();
        assert!(matches!(
            build_ensemble(p.clone(), p, 1.2),
            Err(Error::InvalidProbability(_))
        ));
    }

    #[test]
    fn degenerate_bernoulli_and_determinism() {
        let e = build_ensemble(
            Polymer::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap(),
            Polymer::new(vec![1.0], vec![0.7]).unwrap(),
            1.0,
        )
        .unwrap();
        let c = sample_configuration(&e, -50, 50, 7).unwrap();
        for k in -50..=50 {
            assert_eq!(c.sign(k).unwrap(), Sign::Plus);
        }
        let e2 = dimer(0.5);
        let a = sample_configuration(&e2, -100, 100, 42).unwrap();
        let b = sample_configuration(&e2, -100, 100, 42).unwrap();
        for k in -100..=100 {
            assert_eq!(a.sign(k).unwrap(), b.sign(k).unwrap());
        }
        assert_eq!(a.offset(), b.offset());
        // extension reproduces the shared range bit-identically
        let ext = a.extended(&e2, -200, 200).unwrap();
        for k in -100..=100 {
            assert_eq!(a.sign(k).unwrap(), ext.sign(k).unwrap());
        }
    }

    #[test]
    fn sign_frequency_within_binomial_tolerance() {
        // dimer: the origin cell weights make P(sign_0 = +) = 1/2 exactly
        let e = dimer(0.5);
        let n = 100_000u64;
        let mut plus = 0u64;
        for s in 0..n {
            let c = sample_configuration_indexed(&e, 0, 0, 123, s).unwrap();
            if c.sign(0).unwrap() == Sign::Plus {
                plus += 1;
            }
        }
        let freq = plus as f64 / n as f64;
        let sigma = 0.5 / (n as f64).sqrt();
        assert!(
            (freq - 0.5).abs() < 3.0 * sigma,
            "freq {freq} outside 3 sigma"
        );
    }

    #[test]
    fn offset_distribution_matches_measure() {
        // L+ = 2, L- = 1, p = 1/2: P(sign0=+, l=j) = (1/2)/1.5 = 1/3 per cell,
        // P(sign0=-, l=0) = 1/3.
        let e = build_ensemble(
            Polymer::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap(),
            Polymer::new(vec![1.0], vec![0.7]).unwrap(),
            0.5,
        )
        .unwrap();
        let n = 60_000u64;
        let mut counts = [0u64; 3]; // (+,0), (+,1), (-,0)
        for s in 0..n {
            let c = sample_configuration_indexed(&e, 0, 0, 99, s).unwrap();
            match (c.sign(0).unwrap(), c.offset()) {
                (Sign::Plus, 0) => counts[0] += 1,
                (Sign::Plus, 1) => counts[1] += 1,
                (Sign::Minus, 0) => counts[2] += 1,
                other => panic!("impossible cell {other:?}"),
            }
        }
        for &c in &counts {
            let freq = c as f64 / n as f64;
            let sigma = ((1.0 / 3.0) * (2.0 / 3.0) / n as f64).sqrt();
            assert!(
                (freq - 1.0 / 3.0).abs() < 4.0 * sigma,
                "cell frequency {freq}"
            );
        }
    }

    #[test]
    fn window_assembly_matches_hand_enumeration() {
        // dimer lambda = 0.5, all-plus signs, l = 0: constant arrays
        let e = dimer(0.5);
        let mut c = sample_configuration(&e, -5, 5, 1).unwrap();
        c.signs = vec![Sign::Plus; 11];
        c.offset = 0;
        let w = assemble_window(&c, &e, 0, 3).unwrap();
        for n in 0..=3 {
            assert_eq!(w.v(n).unwrap(), 0.5);
            assert_eq!(w.t(n).unwrap(), 1.0);
        }

        // L+=2/L-=1 example: sign_0 = -, l = 0, sign_1 = +, window [0,2] -> v = (0.7, 0, 0)
        let e2 = build_ensemble(
            Polymer::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap(),
            Polymer::new(vec![1.0], vec![0.7]).unwrap(),
            0.5,
        )
        .unwrap();
        let mut c2 = sample_configuration(&e2, -3, 3, 1).unwrap();
        c2.signs = vec![
            Sign::Plus,
            Sign::Plus,
            Sign::Plus,
            Sign::Minus,
            Sign::Plus,
            Sign::Plus,
            Sign::Plus,
        ];
        c2.offset = 0;
        let w2 = assemble_window(&c2, &e2, 0, 2).unwrap();
        assert_eq!(w2.v(0).unwrap(), 0.7);
        assert_eq!(w2.v(1).unwrap(), 0.0);
        assert_eq!(w2.v(2).unwrap(), 0.0);

        // node positions for signs (+,-,+) with L+=2, L-=1, l=0 -> (0, 2, 3)
        let mut c3 = sample_configuration(&e2, 0, 3, 1).unwrap();
        c3.signs = vec![Sign::Plus, Sign::Minus, Sign::Plus, Sign::Plus];
        c3.offset = 0;
        let w3 = assemble_window(&c3, &e2, 0, 4).unwrap();
        assert_eq!(&w3.node_positions()[..3], &[0, 2, 3]);
        for k in 0..3 {
            assert_eq!(node_position(&c3, &e2, k).unwrap(), [0, 2, 3][k as usize]);
        }
    }

    #[test]
    fn sub_window_consistency() {
        let e = dimer(0.3);
        let c = sample_configuration(&e, -30, 30, 5).unwrap();
        let w = assemble_window(&c, &e, -20, 20).unwrap();
        let sub = w.sub_window(-7, 11).unwrap();
        let direct = assemble_window(&c, &e, -7, 11).unwrap();
        for n in -7..=11 {
            assert_eq!(sub.t(n).unwrap(), direct.t(n).unwrap());
            assert_eq!(sub.v(n).unwrap(), direct.v(n).unwrap());
        }
        assert_eq!(sub.node_positions(), direct.node_positions());
    }

    #[test]
    fn window_beyond_configuration_raises() {
        let e = dimer(0.5);
        let c = sample_configuration(&e, -2, 2, 5).unwrap();
        let err = assemble_window(&c, &e, -40, 40);
        assert!(matches!(err, Err(Error::InsufficientConfiguration(_))));
    }

    #[test]
    fn empirical_mean_length_converges() {
        let e = build_ensemble(
            Polymer::new(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap(),
            Polymer::new(vec![1.0], vec![0.7]).unwrap(),
            0.5,
        )
        .unwrap();
        let k = 10_000usize;
        let mut failures = 0;
        let trials = 50;
        for s in 0..trials {
            let c = sample_configuration_indexed(&e, 0, k as i64, 7, s).unwrap();
            let sum: i64 = (1..=k as i64)
                .map(|j| e.polymer(c.sign(j).unwrap()).len() as i64)
                .sum();
            let dev = (sum as f64 / k as f64 - e.mean_length()).abs();
            if dev >= 5.0 / (k as f64).sqrt() {
                failures += 1;
            }
        }
        assert!(failures <= 1, "{failures}/{trials} trials out of tolerance");
    }
}
