use std::fmt;

/// Single-qubit Pauli operator, ignoring phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Pauli {
        Pauli::ALL[i & 3]
    }

    /// `(x, z)` bits of the symplectic representation.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product ignoring phase.
    pub fn times(self, other: Pauli) -> Pauli {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        Pauli::from_bits(x1 ^ x2, z1 ^ z2)
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        !((x1 & z2) ^ (z1 & x2))
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// Multi-qubit Pauli string on up to 32 qubits, stored as
/// `i^phase * prod_j X_j^{x_j} * prod_j Z_j^{z_j}`.
///
/// A string is Hermitian when `phase` and `popcount(x & z)` have the same
/// parity, and positive when they agree mod 4, since `Y_j = i X_j Z_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u32,
    pub z: u32,
    pub phase: u8,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0, phase: 0 };

    /// Hermitian string with the given sign (`negative` selects -1).
    pub fn hermitian(x: u32, z: u32, negative: bool) -> PauliString {
        let base = ((x & z).count_ones() & 3) as u8;
        PauliString { x, z, phase: (base + if negative { 2 } else { 0 }) & 3 }
    }

    pub fn single(q: usize, p: Pauli) -> PauliString {
        let (x, z) = p.bits();
        PauliString::hermitian((x as u32) << q, (z as u32) << q, false)
    }

    pub fn from_paulis(paulis: &[(usize, Pauli)], negative: bool) -> PauliString {
        let mut x = 0;
        let mut z = 0;
        for &(q, p) in paulis {
            let (px, pz) = p.bits();
            x |= (px as u32) << q;
            z |= (pz as u32) << q;
        }
        PauliString::hermitian(x, z, negative)
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 & 1) == ((self.x & self.z).count_ones() & 1)
    }

    /// Sign of a Hermitian string: `true` for -1.
    pub fn is_negative(&self) -> bool {
        let base = ((self.x & self.z).count_ones() & 3) as u8;
        (self.phase + 4 - base) & 3 == 2
    }

    pub fn negated(mut self) -> PauliString {
        self.phase = (self.phase + 2) & 3;
        self
    }

    pub fn unsigned(self) -> PauliString {
        PauliString::hermitian(self.x, self.z, false)
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() & 1 == 0
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let swaps = (self.z & other.x).count_ones() as u8;
        PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
            phase: (self.phase + other.phase + 2 * (swaps & 1)) & 3,
        }
    }

    pub fn display(&self, n: usize) -> String {
        let mut s = String::with_capacity(n + 1);
        s.push(if self.is_negative() { '-' } else { '+' });
        for q in 0..n {
            s.push_str(&self.get(q).to_string());
        }
        s
    }
}
