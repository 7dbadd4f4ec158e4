//! Identifier tokens shared by automata and Petri nets.
//!
//! Every identifier is a nonempty token with no whitespace and no `#`
//! (which starts a comment in the text formats).

use std::borrow::Borrow;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid identifier {0:?}: must be a nonempty token without whitespace or '#'")]
pub struct InvalidIdent(pub String);

pub(crate) fn is_valid_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '#')
}

macro_rules! ident_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(name: impl Into<String>) -> Result<Self, InvalidIdent> {
                let name = name.into();
                if is_valid_token(&name) {
                    Ok(Self(name))
                } else {
                    Err(InvalidIdent(name))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<&str> for $name {
            type Error = InvalidIdent;

            fn try_from(s: &str) -> Result<Self, Self::Error> {
                Self::new(s)
            }
        }

        impl std::str::FromStr for $name {
            type Err = InvalidIdent;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }
    };
}

ident_type!(
    /// Name of an automaton state.
    StateId
);
ident_type!(
    /// Name of an automaton event (action).
    EventId
);
ident_type!(
    /// Name of a Petri net place.
    PlaceId
);
ident_type!(
    /// Name of a Petri net transition.
    TransitionId
);
