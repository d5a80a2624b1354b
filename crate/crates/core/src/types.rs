//! Simple types over the ground types `o` (first-order terms) and `ε` (unit).

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SimpleType {
    O,
    Unit,
    Pair(Box<SimpleType>, Box<SimpleType>),
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn pair(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Pair(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    /// `o^k`, with `o^0 = ε` and `o^(k+1) = o × o^k`.
    pub fn seq(k: usize) -> SimpleType {
        (0..k).fold(SimpleType::Unit, |acc, _| SimpleType::pair(SimpleType::O, acc))
    }

    /// `o → … → o → ret` with `arity` arrows.
    pub fn curried(arity: usize, ret: SimpleType) -> SimpleType {
        (0..arity).fold(ret, |acc, _| SimpleType::arrow(SimpleType::O, acc))
    }

    /// `args[0] → … → args[n-1] → ret`.
    pub fn function(args: &[SimpleType], ret: SimpleType) -> SimpleType {
        args.iter().rev().fold(ret, |acc, a| SimpleType::arrow(a.clone(), acc))
    }

    pub fn order(&self) -> usize {
        match self {
            SimpleType::O | SimpleType::Unit => 0,
            SimpleType::Pair(a, b) => a.order().max(b.order()),
            SimpleType::Arrow(a, b) => (a.order() + 1).max(b.order()),
        }
    }

    /// `Some(k)` when this is the sequence type `o^k`.
    pub fn seq_len(&self) -> Option<usize> {
        match self {
            SimpleType::Unit => Some(0),
            SimpleType::Pair(a, b) if **a == SimpleType::O => b.seq_len().map(|k| k + 1),
            _ => None,
        }
    }

    /// Types built from `o` and `ε` by pairing only.
    pub fn is_ground_like(&self) -> bool {
        match self {
            SimpleType::O | SimpleType::Unit => true,
            SimpleType::Pair(a, b) => a.is_ground_like() && b.is_ground_like(),
            SimpleType::Arrow(..) => false,
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.seq_len() {
            return match k {
                0 => f.write_str("ε"),
                _ => write!(f, "o^{k}"),
            };
        }
        match self {
            SimpleType::O => f.write_str("o"),
            SimpleType::Unit => f.write_str("ε"),
            SimpleType::Pair(a, b) => write!(f, "({a} × {b})"),
            SimpleType::Arrow(a, b) => match **a {
                SimpleType::Arrow(..) => write!(f, "({a}) → {b}"),
                _ => write!(f, "{a} → {b}"),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::SimpleType as T;

    #[test]
    fn order_examples() {
        assert_eq!(T::O.order(), 0);
        assert_eq!(T::arrow(T::O, T::O).order(), 1);
        assert_eq!(T::arrow(T::arrow(T::O, T::O), T::seq(2)).order(), 2);
    }

    #[test]
    fn sequence_types_unfold() {
        assert_eq!(T::seq(0), T::Unit);
        assert_eq!(T::seq(2), T::pair(T::O, T::pair(T::O, T::Unit)));
        assert_eq!(T::seq(3).seq_len(), Some(3));
        assert_eq!(T::arrow(T::O, T::seq(1)).to_string(), "o → o^1");
    }
}
