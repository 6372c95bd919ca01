use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rayon::prelude::*;

use super::layout::RegisterLayout;
use super::table::AcceptanceTable;
use crate::error::{Error, Result};

/// Below this many amplitudes the operators run on the calling thread.
const PAR_THRESHOLD: usize = 1 << 14;
const MIN_PAR_LEN: usize = 1 << 10;

/// Joint statevector of the walk registers.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl WalkState {
    /// Uniform superposition over the state register; every other register in `|0>`.
    pub fn init(layout: RegisterLayout, qubit_cap: usize) -> Result<Self> {
        layout.check_cap(qubit_cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        let n = 1usize << layout.state_qubits();
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        amps[..n].iter_mut().for_each(|a| *a = amp);
        Ok(Self { layout, amps })
    }

    /// Computational basis state `|idx>`.
    pub fn basis(layout: RegisterLayout, idx: usize, qubit_cap: usize) -> Result<Self> {
        layout.check_cap(qubit_cap)?;
        if idx >= layout.dimension() {
            return Err(Error::OutOfRange(format!("basis index {idx}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { layout, amps })
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dimension() {
            return Err(Error::LengthMismatch {
                what: "amplitudes vs layout dimension",
                left: amps.len(),
                right: layout.dimension(),
            });
        }
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Hadamard on every direction and shift-sign qubit. Self-inverse.
    pub fn apply_v(&mut self) {
        let first = self.layout.direction_shift();
        for q in first..=first + self.layout.direction_qubits() {
            hadamard(&mut self.amps, q);
        }
    }

    /// Coin rotation `|0> -> cos t |0> + sin t |1>`, `|1> -> -sin t |0> + cos t |1>`
    /// with `t = arcsin(sqrt(A))` looked up from the state, direction and sign registers.
    pub fn apply_b(&mut self, table: &AcceptanceTable) -> Result<()> {
        self.rotate_coin(table, false)
    }

    /// Inverse of [`apply_b`](Self::apply_b).
    pub fn apply_b_dagger(&mut self, table: &AcceptanceTable) -> Result<()> {
        self.rotate_coin(table, true)
    }

    fn rotate_coin(&mut self, table: &AcceptanceTable, inverse: bool) -> Result<()> {
        table.check_layout(&self.layout)?;
        let layout = &self.layout;
        let half = layout.coin_bit();
        let state_mask = layout.state_mask();
        let sign_bit = layout.sign_bit();
        let (lo, hi) = self.amps.split_at_mut(half);
        let kernel = |(i, (a0, a1)): (usize, (&mut Complex64, &mut Complex64))| {
            let theta = table.angle(i & state_mask, layout.direction_of(i), usize::from(i & sign_bit != 0));
            if theta == 0.0 {
                return;
            }
            let (s, c) = theta.sin_cos();
            let s = if inverse { -s } else { s };
            let (x0, x1) = (*a0, *a1);
            *a0 = x0 * c - x1 * s;
            *a1 = x0 * s + x1 * c;
        };
        if half >= PAR_THRESHOLD {
            lo.par_iter_mut()
                .zip(hi.par_iter_mut())
                .enumerate()
                .with_min_len(MIN_PAR_LEN)
                .for_each(kernel);
        } else {
            lo.iter_mut().zip(hi.iter_mut()).enumerate().for_each(kernel);
        }
        Ok(())
    }

    /// On coin `|1>`, shift the state-register slice of the parameter named by
    /// `D` by one lattice unit (`+` for sign `|0>`, `-` for `|1>`), with periodic
    /// wrap. Directions `>= P` and coin `|0>` are left unchanged.
    pub fn apply_f(&mut self) {
        let layout = &self.layout;
        let half = layout.coin_bit();
        let params = layout.num_params();
        let sign_bit = layout.sign_bit();
        let upper = &mut self.amps[half..];
        let source: Vec<Complex64> = upper.to_vec();
        // Output index j receives the amplitude from the index that shifts onto it.
        let kernel = |(j, out): (usize, &mut Complex64)| {
            let p = layout.direction_of(j);
            if p >= params {
                return;
            }
            let off = layout.param_offset(p);
            let n = 1usize << layout.param_qubits()[p];
            let mask = (n - 1) << off;
            let k = (j & mask) >> off;
            let from = if j & sign_bit == 0 {
                (k + n - 1) % n
            } else {
                (k + 1) % n
            };
            *out = source[(j & !mask) | (from << off)];
        };
        if half >= PAR_THRESHOLD {
            upper
                .par_iter_mut()
                .enumerate()
                .with_min_len(MIN_PAR_LEN)
                .for_each(kernel);
        } else {
            upper.iter_mut().enumerate().for_each(kernel);
        }
    }

    /// NOT on the shift-sign qubit, controlled by coin `|1>`. Self-inverse.
    pub fn apply_sflip(&mut self) {
        let half = self.layout.coin_bit();
        let sign = self.layout.sign_bit();
        let swap = |chunk: &mut [Complex64]| {
            let (a, b) = chunk.split_at_mut(sign);
            a.swap_with_slice(b);
        };
        let upper = &mut self.amps[half..];
        if half >= PAR_THRESHOLD {
            upper.par_chunks_mut(2 * sign).for_each(swap);
        } else {
            upper.chunks_mut(2 * sign).for_each(swap);
        }
    }

    /// Negates every component with direction, sign and coin registers all `|0>`.
    pub fn apply_r(&mut self) {
        let marked = self.layout.direction_mask() | self.layout.sign_bit() | self.layout.coin_bit();
        let kernel = |(i, a): (usize, &mut Complex64)| {
            if i & marked == 0 {
                *a = -*a;
            }
        };
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps
                .par_iter_mut()
                .enumerate()
                .with_min_len(MIN_PAR_LEN)
                .for_each(kernel);
        } else {
            self.amps.iter_mut().enumerate().for_each(kernel);
        }
    }

    /// One walk step `W = R V' B' S F B V`, factors applied right to left.
    pub fn apply_w(&mut self, table: &AcceptanceTable) -> Result<()> {
        self.apply_v();
        self.apply_b(table)?;
        self.apply_f();
        self.apply_sflip();
        self.apply_b_dagger(table)?;
        self.apply_v();
        self.apply_r();
        Ok(())
    }

    /// Exact marginal `|C_x|^2` of the state register, indexed by flat label.
    pub fn s_marginal(&self) -> Vec<f64> {
        let mask = self.layout.state_mask();
        let mut probs = vec![0.0; mask + 1];
        for (i, a) in self.amps.iter().enumerate() {
            probs[i & mask] += a.norm_sqr();
        }
        probs
    }
}

fn hadamard(amps: &mut [Complex64], qubit: usize) {
    let stride = 1usize << qubit;
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let kernel = |chunk: &mut [Complex64]| {
        let (a, b) = chunk.split_at_mut(stride);
        for (x, y) in a.iter_mut().zip(b.iter_mut()) {
            let (u, v) = (*x, *y);
            *x = (u + v) * scale;
            *y = (u - v) * scale;
        }
    };
    if amps.len() >= PAR_THRESHOLD {
        amps.par_chunks_mut(2 * stride).for_each(kernel);
    } else {
        amps.chunks_mut(2 * stride).for_each(kernel);
    }
}

/// Empirical frequencies from `shots` categorical draws of `probs`.
pub fn sample_shots<R: Rng + ?Sized>(probs: &[f64], shots: usize, rng: &mut R) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shot count must be positive".into()));
    }
    let dist = WeightedIndex::new(probs).map_err(|e| Error::InvalidParameter(format!("bad marginal: {e}")))?;
    let mut counts = vec![0usize; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(rng)] += 1;
    }
    Ok(counts.into_iter().map(|c| c as f64 / shots as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qwalk::layout::DEFAULT_QUBIT_CAP;
    use std::f64::consts::FRAC_PI_2;

    const CAP: usize = DEFAULT_QUBIT_CAP;

    fn random_state(layout: RegisterLayout, seed: u64) -> WalkState {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..layout.dimension())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= n);
        WalkState::from_amplitudes(layout, amps).unwrap()
    }

    fn max_diff(a: &WalkState, b: &WalkState) -> f64 {
        a.amplitudes()
            .iter()
            .zip(b.amplitudes())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn init_is_uniform_over_state_register() {
        let layout = RegisterLayout::uniform(1, 2, 1).unwrap();
        let st = WalkState::init(layout, CAP).unwrap();
        for (i, a) in st.amplitudes().iter().enumerate() {
            let expected = if i < 4 { 0.5 } else { 0.0 };
            assert_eq!(a.re, expected);
        }
        assert!((st.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(st.s_marginal(), vec![0.25; 4]);
    }

    #[test]
    fn init_respects_cap() {
        let layout = RegisterLayout::uniform(2, 6, 3).unwrap();
        assert!(matches!(
            WalkState::init(layout, 17),
            Err(Error::QubitCap { required: 18, cap: 17 })
        ));
    }

    #[test]
    fn v_builds_move_superposition() {
        // P = 2: one direction qubit, so V maps |0>_D|0>_E to a product of |+> states.
        let layout = RegisterLayout::uniform(2, 1, 1).unwrap();
        let mut st = WalkState::basis(layout.clone(), 0, CAP).unwrap();
        st.apply_v();
        let d = layout.direction_shift();
        for (i, a) in st.amplitudes().iter().enumerate() {
            let in_span = i & !(0b11 << d) == 0;
            let expected = if in_span { 0.5 } else { 0.0 };
            assert!((a.re - expected).abs() < 1e-15 && a.im == 0.0);
        }
        st.apply_v();
        assert!(max_diff(&st, &WalkState::basis(layout, 0, CAP).unwrap()) < 1e-15);
    }

    #[test]
    fn b_with_certain_and_zero_acceptance() {
        let layout = RegisterLayout::uniform(1, 2, 3).unwrap();
        let one = AcceptanceTable::constant(&layout, 1.0).unwrap();
        assert_eq!(one.angle(0, 0, 0), FRAC_PI_2);
        let mut st = WalkState::basis(layout.clone(), 2, CAP).unwrap();
        st.apply_b(&one).unwrap();
        assert!((st.amplitudes()[2 | layout.coin_bit()].re - 1.0).abs() < 1e-15);
        assert!(st.amplitudes()[2].norm() < 1e-15);

        let zero = AcceptanceTable::constant(&layout, 0.0).unwrap();
        let mut st = WalkState::basis(layout.clone(), 2, CAP).unwrap();
        st.apply_b(&zero).unwrap();
        assert_eq!(st, WalkState::basis(layout, 2, CAP).unwrap());
    }

    #[test]
    fn b_half_acceptance_balances_the_coin() {
        for a in [3, 6, 10] {
            let layout = RegisterLayout::uniform(1, 1, a).unwrap();
            let table = AcceptanceTable::constant(&layout, 0.5).unwrap();
            let mut st = WalkState::basis(layout.clone(), 0, CAP).unwrap();
            st.apply_b(&table).unwrap();
            let p1 = st.amplitudes()[layout.coin_bit()].norm_sqr();
            assert!((p1 - 0.5).abs() <= 1.0 / ((1 << a) - 1) as f64);
        }
    }

    #[test]
    fn f_shifts_only_on_coin_one() {
        let layout = RegisterLayout::uniform(2, 2, 1).unwrap();
        let coin = layout.coin_bit();
        // coin |0>: untouched
        let st0 = random_state(layout.clone(), 1);
        let mut st = st0.clone();
        st.apply_f();
        for i in 0..coin {
            assert_eq!(st.amplitudes()[i], st0.amplitudes()[i]);
        }
        // coin |1>, D = 0, sign +, slice index 3 -> 0
        let mut st = WalkState::basis(layout.clone(), coin | 0b0011, CAP).unwrap();
        st.apply_f();
        assert_eq!(st.amplitudes()[coin].re, 1.0);
        // D = 1 moves the second slice, sign - wraps 0 -> 3
        let idx = coin | layout.sign_bit() | (1 << layout.direction_shift()) | 0b0001;
        let mut st = WalkState::basis(layout.clone(), idx, CAP).unwrap();
        st.apply_f();
        let expected = coin | layout.sign_bit() | (1 << layout.direction_shift()) | 0b1101;
        assert_eq!(st.amplitudes()[expected].re, 1.0);
    }

    #[test]
    fn f_then_flipped_f_restores() {
        let layout = RegisterLayout::uniform(2, 2, 1).unwrap();
        let st0 = random_state(layout, 2);
        let mut st = st0.clone();
        st.apply_f();
        st.apply_sflip();
        st.apply_f();
        st.apply_sflip();
        assert!(max_diff(&st, &st0) < 1e-15);
    }

    #[test]
    fn unused_directions_do_not_move() {
        // P = 3 leaves direction pattern 3 unused.
        let layout = RegisterLayout::uniform(3, 1, 1).unwrap();
        let idx = layout.coin_bit() | (3 << layout.direction_shift()) | 0b101;
        let mut st = WalkState::basis(layout.clone(), idx, CAP).unwrap();
        st.apply_f();
        assert_eq!(st.amplitudes()[idx].re, 1.0);
        let table = AcceptanceTable::constant(&layout, 1.0).unwrap();
        let idx = (3 << layout.direction_shift()) | 0b101;
        let mut st = WalkState::basis(layout.clone(), idx, CAP).unwrap();
        st.apply_b(&table).unwrap();
        assert_eq!(st.amplitudes()[idx].re, 1.0);
    }

    #[test]
    fn sflip_and_r_actions() {
        let layout = RegisterLayout::uniform(1, 2, 1).unwrap();
        let coin = layout.coin_bit();
        let sign = layout.sign_bit();
        let mut st = WalkState::basis(layout.clone(), 1, CAP).unwrap();
        st.apply_sflip();
        assert_eq!(st.amplitudes()[1].re, 1.0);
        let mut st = WalkState::basis(layout.clone(), coin | 1, CAP).unwrap();
        st.apply_sflip();
        assert_eq!(st.amplitudes()[coin | sign | 1].re, 1.0);

        let mut st = WalkState::basis(layout.clone(), 3, CAP).unwrap();
        st.apply_r();
        assert_eq!(st.amplitudes()[3].re, -1.0);
        let mut st = WalkState::basis(layout.clone(), coin | 3, CAP).unwrap();
        st.apply_r();
        assert_eq!(st.amplitudes()[coin | 3].re, 1.0);
    }

    #[test]
    fn flat_walk_keeps_uniform_marginal() {
        let layout = RegisterLayout::uniform(2, 2, 3).unwrap();
        let table = AcceptanceTable::constant(&layout, 1.0).unwrap();
        let mut st = WalkState::init(layout, CAP).unwrap();
        for _ in 0..6 {
            st.apply_w(&table).unwrap();
            for p in st.s_marginal() {
                assert!((p - 1.0 / 16.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn parallel_and_serial_paths_agree() {
        // 15 qubits crosses PAR_THRESHOLD; compare with a smaller-chunk reference.
        let layout = RegisterLayout::uniform(2, 5, 3).unwrap();
        assert!(layout.dimension() >= PAR_THRESHOLD);
        let vals: Vec<f64> = (0..(1usize << 10) * 4)
            .map(|i| ((i * 37) % 101) as f64 / 100.0)
            .collect();
        let table = AcceptanceTable::from_values(&layout, vals).unwrap();
        let st0 = random_state(layout, 9);
        let mut a = st0.clone();
        a.apply_w(&table).unwrap();
        let b = a.clone();
        a.apply_w(&table).unwrap();
        let mut c = b.clone();
        c.apply_w(&table).unwrap();
        assert_eq!(a, c);
        assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_marginal_is_a_delta() {
        let layout = RegisterLayout::uniform(2, 2, 1).unwrap();
        let idx = layout.coin_bit() | 0b0110;
        let st = WalkState::basis(layout, idx, CAP).unwrap();
        let m = st.s_marginal();
        assert_eq!(m[6], 1.0);
        assert_eq!(m.iter().sum::<f64>(), 1.0);
    }
}
