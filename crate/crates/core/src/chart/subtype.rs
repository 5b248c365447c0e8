//! The 30 chart subtypes, their families, ID codes and table-shape rules.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::table::RowRule;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartFamily {
    Bar,
    Line,
    Pie,
    Scatter,
    Box,
    Combination,
}

impl ChartFamily {
    pub const ALL: [ChartFamily; 6] = [
        ChartFamily::Bar,
        ChartFamily::Line,
        ChartFamily::Pie,
        ChartFamily::Scatter,
        ChartFamily::Box,
        ChartFamily::Combination,
    ];

    /// Chart counts per family in the reference corpus of 50,010 charts.
    pub const REFERENCE_COUNTS: [u32; 6] = [18_337, 11_669, 6_668, 6_668, 5_001, 1_667];

    pub fn name(self) -> &'static str {
        match self {
            ChartFamily::Bar => "bar",
            ChartFamily::Line => "line",
            ChartFamily::Pie => "pie",
            ChartFamily::Scatter => "scatter",
            ChartFamily::Box => "box",
            ChartFamily::Combination => "combination",
        }
    }

    pub fn index(self) -> usize {
        ChartFamily::ALL.iter().position(|f| *f == self).unwrap()
    }

    pub fn probability(self) -> f64 {
        let total: u32 = ChartFamily::REFERENCE_COUNTS.iter().sum();
        f64::from(ChartFamily::REFERENCE_COUNTS[self.index()]) / f64::from(total)
    }

    pub fn subtypes(self) -> impl Iterator<Item = ChartSubtype> {
        ChartSubtype::ALL.into_iter().filter(move |s| s.family() == self)
    }

    /// Draws a family with the reference proportions.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> ChartFamily {
        let total: u32 = ChartFamily::REFERENCE_COUNTS.iter().sum();
        let mut x = rng.gen_range(0..total);
        for (f, c) in ChartFamily::ALL.iter().zip(ChartFamily::REFERENCE_COUNTS) {
            if x < c {
                return *f;
            }
            x -= c;
        }
        unreachable!()
    }
}

impl fmt::Display for ChartFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

macro_rules! subtypes {
    ($($variant:ident => $family:ident, $name:literal, $code:literal, $rule:expr;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ChartSubtype {
            $($variant,)*
        }

        impl ChartSubtype {
            pub const ALL: [ChartSubtype; 30] = [$(ChartSubtype::$variant,)*];

            pub fn family(self) -> ChartFamily {
                match self { $(ChartSubtype::$variant => ChartFamily::$family,)* }
            }

            /// Display name, as used in chart metadata and the template registry.
            pub fn name(self) -> &'static str {
                match self { $(ChartSubtype::$variant => $name,)* }
            }

            /// Abbreviation used as the last component of chart ids.
            pub fn code(self) -> &'static str {
                match self { $(ChartSubtype::$variant => $code,)* }
            }

            /// Legend rows the backing table must have.
            pub fn row_rule(self) -> RowRule {
                match self { $(ChartSubtype::$variant => $rule,)* }
            }
        }
    };
}

use RowRule::{AtLeast, Exactly, Observations};

/// Minimum observations per entity for box statistics.
pub const MIN_BOX_POINTS: usize = 5;

subtypes! {
    VerticalBar => Bar, "Vertical Bar", "Vbar", Exactly(1);
    HorizontalBar => Bar, "Horizontal Bar", "Hbar", Exactly(1);
    StackVerticalBar => Bar, "Stack Vertical Bar", "S-Vbar", AtLeast(2);
    StackHorizontalBar => Bar, "Stack Horizontal Bar", "S-Hbar", AtLeast(2);
    GroupVerticalBar => Bar, "Group Vertical Bar", "GVbar", AtLeast(2);
    GroupHorizontalBar => Bar, "Group Horizontal Bar", "GHbar", AtLeast(2);
    PolarVerticalBar => Bar, "Polar Coordinates Vertical Bar", "P-Vbar", Exactly(1);
    PolarHorizontalBar => Bar, "Polar Coordinates Horizontal Bar", "P-Hbar", Exactly(1);
    PolarStackVerticalBar => Bar, "Polar Coordinates Stack Vertical Bar", "PS-Vbar", AtLeast(2);
    PolarStackHorizontalBar => Bar, "Polar Coordinates Stack Horizontal Bar", "PS-Hbar", AtLeast(2);
    WaterfallBar => Bar, "Waterfall Bar", "Wbar", Exactly(1);
    SingleLine => Line, "Single Line", "Sline", Exactly(1);
    SmoothSingleLine => Line, "Smooth Single Line", "SSline", Exactly(1);
    MultiLine => Line, "MultiLine", "Mline", AtLeast(2);
    MarkerSingleLine => Line, "Marker Single Line", "MKSline", Exactly(1);
    BestValueSingleLine => Line, "Best Value Single Line", "BVSline", Exactly(1);
    BestValueMultiLine => Line, "Best Value MultiLine", "BVMline", AtLeast(2);
    IntervalHighlightSingleLine => Line, "Interval Highlight Single Line", "IHSline", Exactly(1);
    SimplePie => Pie, "Simple Pie", "Spie", Exactly(1);
    RingPie => Pie, "Ring Pie", "Rpie", Exactly(1);
    RosePie => Pie, "Rose Pie", "ROpie", Exactly(1);
    NestingPie => Pie, "Nesting Pie", "Npie", Exactly(2);
    SimpleScatter => Scatter, "Simple Scatter", "Sscatter", Exactly(1);
    MultiScatter => Scatter, "Multi Scatter", "Mscatter", AtLeast(2);
    BubbleScatter => Scatter, "Bubble Scatter", "Bscatter", Exactly(1);
    CheckBubbleScatter => Scatter, "Check Bubble Scatter", "CBscatter", AtLeast(2);
    VerticalBoxplot => Box, "Vertical Boxplot", "Vbox", Observations(MIN_BOX_POINTS);
    HorizontalBoxplot => Box, "Horizontal Boxplot", "Hbox", Observations(MIN_BOX_POINTS);
    MultiBoxplot => Box, "Multi Boxplot", "Mbox", Observations(MIN_BOX_POINTS);
    LineBar => Combination, "Line Bar", "LBcomb", Exactly(2);
}

impl ChartSubtype {
    /// Categories run down the vertical axis and values grow to the right.
    pub fn is_horizontal(self) -> bool {
        use ChartSubtype::*;
        matches!(
            self,
            HorizontalBar
                | StackHorizontalBar
                | GroupHorizontalBar
                | PolarHorizontalBar
                | PolarStackHorizontalBar
                | HorizontalBoxplot
        )
    }

    pub fn is_polar(self) -> bool {
        use ChartSubtype::*;
        matches!(self, PolarVerticalBar | PolarHorizontalBar | PolarStackVerticalBar | PolarStackHorizontalBar)
    }

    pub fn is_stacked(self) -> bool {
        use ChartSubtype::*;
        matches!(self, StackVerticalBar | StackHorizontalBar | PolarStackVerticalBar | PolarStackHorizontalBar)
    }

    /// More than one data series is drawn.
    pub fn is_multi_series(self) -> bool {
        matches!(self.row_rule(), RowRule::AtLeast(_) | RowRule::Exactly(2))
    }

    /// Series are keyed by entity rather than by legend row (one color per
    /// slice or per box).
    pub fn colors_by_entity(self) -> bool {
        self.family() == ChartFamily::Pie || self == ChartSubtype::MultiBoxplot
    }

    /// Draws a subtype: family by reference proportion, then uniform within it.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> ChartSubtype {
        let family = ChartFamily::sample(rng);
        ChartSubtype::sample_in(family, rng)
    }

    pub fn sample_in<R: Rng + ?Sized>(family: ChartFamily, rng: &mut R) -> ChartSubtype {
        let members: Vec<ChartSubtype> = family.subtypes().collect();
        members[rng.gen_range(0..members.len())]
    }

    pub fn from_code(code: &str) -> Option<ChartSubtype> {
        ChartSubtype::ALL.into_iter().find(|s| s.code() == code)
    }
}

/// Free-function form of [`ChartSubtype::sample`].
pub fn sample_subtype<R: Rng + ?Sized>(rng: &mut R) -> ChartSubtype {
    ChartSubtype::sample(rng)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSubtype(pub String);

impl fmt::Display for UnknownSubtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown chart subtype `{}`", self.0)
    }
}

impl std::error::Error for UnknownSubtype {}

impl FromStr for ChartSubtype {
    type Err = UnknownSubtype;

    /// Accepts display names case-insensitively, and id codes.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        ChartSubtype::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(t))
            .or_else(|| ChartSubtype::from_code(t))
            .ok_or_else(|| UnknownSubtype(s.to_string()))
    }
}

impl fmt::Display for ChartSubtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for ChartSubtype {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ChartSubtype {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
