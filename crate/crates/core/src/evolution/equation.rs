use std::fmt;

/// Which member of the equation family is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EquationKind {
    /// `u_t + H u_xx + s (u^2)_x = 0`, real.
    Bo,
    /// `u_t + H u_xx + s u^2 u_x = 0`, real.
    Mbo,
    /// `u_t - i u_xx + s |u|^2 u_x = 0`, complex.
    Dnls,
}

impl EquationKind {
    pub fn is_real(self) -> bool {
        !matches!(self, EquationKind::Dnls)
    }

    pub fn name(self) -> &'static str {
        match self {
            EquationKind::Bo => "BO",
            EquationKind::Mbo => "mBO",
            EquationKind::Dnls => "DNLS",
        }
    }

    pub fn parse(s: &str) -> Option<EquationKind> {
        match s.to_ascii_lowercase().as_str() {
            "bo" => Some(EquationKind::Bo),
            "mbo" => Some(EquationKind::Mbo),
            "dnls" => Some(EquationKind::Dnls),
            _ => None,
        }
    }
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sign `s` in front of the nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EquationSpec {
    pub kind: EquationKind,
    pub sign: Sign,
    /// `false` drops the nonlinear term entirely (free flow).
    pub nonlinear: bool,
}

impl EquationSpec {
    pub fn new(kind: EquationKind, sign: Sign) -> Self {
        EquationSpec {
            kind,
            sign,
            nonlinear: true,
        }
    }

    pub fn mbo() -> Self {
        EquationSpec::new(EquationKind::Mbo, Sign::Plus)
    }

    pub fn bo() -> Self {
        EquationSpec::new(EquationKind::Bo, Sign::Plus)
    }

    pub fn dnls() -> Self {
        EquationSpec::new(EquationKind::Dnls, Sign::Plus)
    }

    pub fn linear(self) -> Self {
        EquationSpec {
            nonlinear: false,
            ..self
        }
    }
}
