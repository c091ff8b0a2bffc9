use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A supply of independent uniform random bits, consumed most significant first.
pub trait BitSource {
    fn next_bit(&mut self) -> bool;

    /// `k <= 64` bits packed into the low end of the result, first bit drawn
    /// in the highest position.
    fn next_bits(&mut self, k: u32) -> u64 {
        assert!(k <= 64, "at most 64 bits per draw");
        (0..k).fold(0u64, |acc, _| (acc << 1) | self.next_bit() as u64)
    }
}

impl<B: BitSource + ?Sized> BitSource for &mut B {
    fn next_bit(&mut self) -> bool {
        (**self).next_bit()
    }

    fn next_bits(&mut self, k: u32) -> u64 {
        (**self).next_bits(k)
    }
}

/// Deterministic random bit stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8: the seed keys the cipher (expanded with
/// `seed_from_u64`) and the stream id selects the 64-bit ChaCha stream
/// counter, so distinct ids from one seed never overlap. Output is
/// identical on every platform.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
    // valid bits live at the top of the buffer
    buffer: u128,
    available: u32,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
            buffer: 0,
            available: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A full 64-bit word, bypassing the bit buffer.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn refill(&mut self) {
        debug_assert!(self.available < 64);
        let fresh = self.rng.next_u64() as u128;
        self.buffer |= fresh << (64 - self.available);
        self.available += 64;
    }
}

impl BitSource for RngStream {
    fn next_bit(&mut self) -> bool {
        self.next_bits(1) == 1
    }

    fn next_bits(&mut self, k: u32) -> u64 {
        assert!(k <= 64, "at most 64 bits per draw");
        if k == 0 {
            return 0;
        }
        if self.available < k {
            self.refill();
        }
        let out = (self.buffer >> (128 - k)) as u64;
        self.buffer <<= k;
        self.available -= k;
        out
    }
}

/// Replays a fixed bit string, then zeros. Used to enumerate every outcome
/// of a rounding decision exhaustively.
#[derive(Clone, Debug, Default)]
pub struct FixedBits {
    bits: Vec<bool>,
    position: usize,
}

impl FixedBits {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits, position: 0 }
    }

    /// The `width` low bits of `value`, most significant first.
    pub fn from_value(value: u64, width: u32) -> Self {
        Self::new((0..width).rev().map(|i| (value >> i) & 1 == 1).collect())
    }

    pub fn consumed(&self) -> usize {
        self.position
    }
}

impl BitSource for FixedBits {
    fn next_bit(&mut self) -> bool {
        let bit = self.bits.get(self.position).copied().unwrap_or(false);
        self.position += 1;
        bit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_stream_reproduce() {
        let mut a = RngStream::new(7, 3);
        let mut b = RngStream::new(7, 3);
        let xs: Vec<u64> = (0..50).map(|i| a.next_bits(1 + i % 64)).collect();
        let ys: Vec<u64> = (0..50).map(|i| b.next_bits(1 + i % 64)).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn streams_differ() {
        let mut a = RngStream::new(7, 0);
        let mut b = RngStream::new(7, 1);
        let mut c = RngStream::new(8, 0);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_ne!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn bit_draws_are_msb_first_slices_of_words() {
        let mut words = RngStream::new(11, 5);
        let w0 = words.next_u64();
        let w1 = words.next_u64();
        let mut bits = RngStream::new(11, 5);
        assert_eq!(bits.next_bits(4), w0 >> 60);
        assert_eq!(bits.next_bits(56), (w0 >> 4) & ((1 << 56) - 1));
        // straddles the word boundary
        assert_eq!(bits.next_bits(8), ((w0 & 0xf) << 4) | (w1 >> 60));
        assert_eq!(bits.next_bits(60), w1 & ((1 << 60) - 1));
    }

    #[test]
    fn bits_are_balanced() {
        let mut s = RngStream::new(1, 2);
        let n = 200_000;
        let ones = (0..n).filter(|_| s.next_bit()).count() as f64;
        let sd = (n as f64 * 0.25).sqrt();
        assert!((ones - n as f64 / 2.0).abs() < 5.0 * sd);
    }

    #[test]
    fn fixed_bits_replay() {
        let mut f = FixedBits::from_value(0b101, 3);
        assert!(f.next_bit());
        assert!(!f.next_bit());
        assert!(f.next_bit());
        assert!(!f.next_bit());
        assert_eq!(f.consumed(), 4);
        assert_eq!(FixedBits::from_value(0b1101, 4).next_bits(4), 0b1101);
    }
}
