/// `x ← (1103515245·x + 12345) mod 2^31`, used only for CHASE_DOT target placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    const MUL: u64 = 1_103_515_245;
    const INC: u64 = 12_345;
    const MASK: u64 = (1 << 31) - 1;

    /// The seed is reduced modulo 2^31 to form `x₀`.
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed & Self::MASK,
        }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn next_value(&mut self) -> u64 {
        self.state = (Self::MUL.wrapping_mul(self.state).wrapping_add(Self::INC)) & Self::MASK;
        self.state
    }
}
