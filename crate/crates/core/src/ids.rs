use alloc::string::String;
use core::fmt;

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
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

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(String::from(s))
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(
    /// A marked point of the sphere.
    PointId
);
string_id!(
    /// An isotopy class of non-peripheral simple closed curves.
    CurveId
);
string_id!(
    /// A shielding disk.
    DiskId
);
string_id!(
    /// An annulus: a shielding ring, or a thin part / level-1 annulus of a standard form.
    AnnulusId
);
string_id!(
    /// A thick piece (level 0 or level 1) of a decomposition.
    PieceId
);
string_id!(
    /// A concrete boundary-curve instance of a thin annulus or a level-1 piece.
    BoundaryId
);
