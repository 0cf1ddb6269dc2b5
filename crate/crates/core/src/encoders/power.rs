use std::fmt;
use std::str::FromStr;

use super::EncodeError;
use crate::syntax::{parse, Alphabet, Expr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerKind {
    /// `{a^(2^k)}`.
    OneExp,
    /// `{a^(2^(2^k))}`.
    TwoExp,
    /// Lookahead-free variant built from negative lookaheads only.
    TwoExpNeg,
    /// `{a^(2^(2^n) + 2^n)}` using positive lookaheads only.
    Halving,
}

impl PowerKind {
    pub const ALL: [PowerKind; 4] = [PowerKind::OneExp, PowerKind::TwoExp, PowerKind::TwoExpNeg, PowerKind::Halving];

    pub fn name(self) -> &'static str {
        match self {
            PowerKind::OneExp => "1exp",
            PowerKind::TwoExp => "2exp",
            PowerKind::TwoExpNeg => "2exp-neg",
            PowerKind::Halving => "halving",
        }
    }

    /// Closed-form membership of `a^n`, where one is known.
    pub fn contains(self, n: u64) -> Option<bool> {
        let pow2 = |x: u64| x.is_power_of_two();
        match self {
            PowerKind::OneExp => Some(pow2(n)),
            PowerKind::TwoExp => Some(pow2(n) && pow2(n.trailing_zeros() as u64)),
            PowerKind::TwoExpNeg => None,
            PowerKind::Halving => Some((0..6).any(|k| {
                let small = 1u64 << k;
                small < 63 && (1u64 << small) + small == n
            })),
        }
    }
}

impl fmt::Display for PowerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PowerKind {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PowerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| EncodeError::Invalid(format!("unknown power language {s:?}")))
    }
}

fn unary() -> Alphabet {
    Alphabet::new(['a']).expect("one symbol")
}

pub fn encode_power_language(kind: PowerKind) -> Expr {
    let text = match kind {
        PowerKind::OneExp => r"(?=(?<x>a))(?=(?<x>\k<x>\k<x>))*\k<x>",
        PowerKind::TwoExp => concat!(
            r"(?=(?<m>a))((?=(?<n>\k<n>a))(?=(?<m>\k<m>\k<m>)))*",
            r"(?=(?<x>a))((?=(?<y>\k<y>a))(?=(?<x>\k<x>\k<x>)))*",
            r"(?=a*(?=\k<m>$)(?=\k<y>$))\k<x>",
        ),
        PowerKind::TwoExpNeg => concat!(
            r"(?<m>a)((?<n>\k<n>a)(?<m>\k<m>\k<m>))*",
            r"(?<x>a)((?<y>\k<y>a)(?<x>\k<x>\k<x>))*",
            r"(?!(?!\k<m>$))(?!(?!\k<y>$))a*",
        ),
        // m = 2^j with mh = m/2 (mh = 1 when m = 1); y = 2^k with
        // kh = k/2 (kh = 0 when k = 1). Consuming y then mh·kh with both m
        // and k still ahead forces m = k, except m = 1, k = 2, which yields
        // the member a^6 as well.
        PowerKind::Halving => concat!(
            r"((?=(?<m>a))(?=(?<mh>a))|(?=(?<m>aa))(?=(?<mh>a))((?=(?<m>\k<m>\k<m>))(?=(?<mh>\k<mh>\k<mh>)))*)",
            r"((?=(?<k>a))(?=(?<y>aa))|(?=(?<k>aa))(?=(?<y>aaaa))(?=(?<kh>a))",
            r"((?=(?<k>\k<k>aa))(?=(?<y>\k<y>\k<y>\k<y>\k<y>))(?=(?<kh>\k<kh>a)))*)",
            r"\k<y>(?=\k<m>)(?=\k<k>)\k<mh>\k<kh>",
        ),
    };
    parse(text, &unary()).expect("fixed expression parses")
}

/// Accepts `a^n` for prime `n`, and also ε.
pub fn prime_expr() -> Expr {
    parse(r"(?!a$|(?<w>aaa*)\k<w>\k<w>*$)a*$", &unary()).expect("fixed expression parses")
}
