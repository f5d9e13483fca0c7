//! The canonical action grammar: the six executable action kinds, their
//! single-line string form, and the parser/renderer pair that every dataset
//! file, transcript, and CLI surface shares.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// One executable unit on the simulated device.
///
/// `ClickTarget` is the ungrounded form a model emits (`CLICK(Search Bar)`);
/// the runner resolves it to a coordinate `Click` through the element
/// registry before execution.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    /// Click at absolute screen coordinates.
    Click { x: i64, y: i64 },
    /// Click a named element; unresolved until grounded.
    ClickTarget { element: String },
    Scroll(ScrollDirection),
    Type { text: String },
    Back,
    Exit,
    /// Pause for a positive number of seconds.
    Wait { seconds: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScrollDirection {
    Up,
    Down,
    Left,
    Right,
}

impl ScrollDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            ScrollDirection::Up => "up",
            ScrollDirection::Down => "down",
            ScrollDirection::Left => "left",
            ScrollDirection::Right => "right",
        }
    }
}

impl fmt::Display for ScrollDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Why a candidate action line was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseActionError {
    #[error("unknown action name `{0}`")]
    UnknownActionName(String),
    #[error("{keyword} expects {expected} argument(s), got {got}")]
    ArityMismatch {
        keyword: &'static str,
        expected: &'static str,
        got: usize,
    },
    #[error("bad attribute for {keyword}: {detail}")]
    BadAttribute { keyword: &'static str, detail: String },
}

const KEYWORDS: [&str; 6] = ["CLICK", "SCROLL", "TYPE", "BACK", "EXIT", "WAIT"];

/// Parse one single-line candidate like `CLICK(200, 300)` or a bare `EXIT`.
///
/// Keywords match case-insensitively. `CLICK` with one non-numeric argument
/// yields [`Action::ClickTarget`]; with two integers it yields
/// [`Action::Click`]; a lone integer is an arity error, not a target name.
pub fn parse_action(text: &str) -> Result<Action, ParseActionError> {
    let line = text.trim();
    if line.contains('\n') {
        return Err(ParseActionError::BadAttribute {
            keyword: "action",
            detail: "expected a single line".to_string(),
        });
    }

    let (head, interior) = match line.find('(') {
        None => (line, None),
        Some(open) => {
            if !line.ends_with(')') {
                let head = line[..open].trim();
                if !is_keyword(head) {
                    return Err(ParseActionError::UnknownActionName(head.to_string()));
                }
                return Err(ParseActionError::BadAttribute {
                    keyword: "action",
                    detail: "missing closing `)`".to_string(),
                });
            }
            (line[..open].trim(), Some(&line[open + 1..line.len() - 1]))
        }
    };

    let keyword = head.to_ascii_uppercase();
    if !is_keyword(&keyword) {
        return Err(ParseActionError::UnknownActionName(head.to_string()));
    }

    match (keyword.as_str(), interior) {
        ("BACK", None) => Ok(Action::Back),
        ("EXIT", None) => Ok(Action::Exit),
        ("BACK", Some(args)) if args.trim().is_empty() => Ok(Action::Back),
        ("EXIT", Some(args)) if args.trim().is_empty() => Ok(Action::Exit),
        ("BACK", Some(args)) => Err(arity("BACK", "0", count_args(args))),
        ("EXIT", Some(args)) => Err(arity("EXIT", "0", count_args(args))),
        ("CLICK", Some(args)) => parse_click(args),
        ("SCROLL", Some(args)) => parse_scroll(args),
        ("TYPE", Some(args)) => Ok(Action::Type {
            text: args.to_string(),
        }),
        ("WAIT", Some(args)) => parse_wait(args),
        (kw, None) => Err(arity(leak_keyword(kw), "1+", 0)),
        _ => unreachable!("keyword set is closed"),
    }
}

fn is_keyword(head: &str) -> bool {
    KEYWORDS.iter().any(|k| head.eq_ignore_ascii_case(k))
}

fn leak_keyword(kw: &str) -> &'static str {
    KEYWORDS
        .iter()
        .find(|k| k.eq_ignore_ascii_case(kw))
        .expect("caller checked keyword")
}

fn arity(keyword: &'static str, expected: &'static str, got: usize) -> ParseActionError {
    ParseActionError::ArityMismatch {
        keyword,
        expected,
        got,
    }
}

fn count_args(interior: &str) -> usize {
    if interior.trim().is_empty() {
        0
    } else {
        interior.split(',').count()
    }
}

fn parse_click(interior: &str) -> Result<Action, ParseActionError> {
    let parts: Vec<&str> = interior.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [single] => {
            if single.is_empty() {
                return Err(arity("CLICK", "1 or 2", 0));
            }
            if single.parse::<i64>().is_ok() {
                // A lone integer is half a coordinate pair, not an element name.
                return Err(arity("CLICK", "2", 1));
            }
            Ok(Action::ClickTarget {
                element: (*single).to_string(),
            })
        }
        [xs, ys] => {
            let x = xs.parse::<i64>().map_err(|_| ParseActionError::BadAttribute {
                keyword: "CLICK",
                detail: format!("non-integer coordinate `{xs}`"),
            })?;
            let y = ys.parse::<i64>().map_err(|_| ParseActionError::BadAttribute {
                keyword: "CLICK",
                detail: format!("non-integer coordinate `{ys}`"),
            })?;
            Ok(Action::Click { x, y })
        }
        more => Err(arity("CLICK", "1 or 2", more.len())),
    }
}

fn parse_scroll(interior: &str) -> Result<Action, ParseActionError> {
    let parts: Vec<&str> = interior.split(',').map(str::trim).collect();
    let [dir] = parts.as_slice() else {
        return Err(arity("SCROLL", "1", parts.len()));
    };
    let direction = match dir.to_ascii_lowercase().as_str() {
        "up" => ScrollDirection::Up,
        "down" => ScrollDirection::Down,
        "left" => ScrollDirection::Left,
        "right" => ScrollDirection::Right,
        other => {
            return Err(ParseActionError::BadAttribute {
                keyword: "SCROLL",
                detail: format!("invalid direction `{other}`, expected one of up, down, left, right"),
            });
        }
    };
    Ok(Action::Scroll(direction))
}

fn parse_wait(interior: &str) -> Result<Action, ParseActionError> {
    let parts: Vec<&str> = interior.split(',').map(str::trim).collect();
    let [secs] = parts.as_slice() else {
        return Err(arity("WAIT", "1", parts.len()));
    };
    let seconds: i64 = secs.parse().map_err(|_| ParseActionError::BadAttribute {
        keyword: "WAIT",
        detail: format!("non-integer wait time `{secs}`"),
    })?;
    if seconds < 1 {
        return Err(ParseActionError::BadAttribute {
            keyword: "WAIT",
            detail: format!("wait time must be >= 1 second, got {seconds}"),
        });
    }
    Ok(Action::Wait {
        seconds: seconds as u32,
    })
}

/// Canonical single-line serialization; `parse_action(render_action(a)) == a`.
pub fn render_action(action: &Action) -> String {
    match action {
        Action::Click { x, y } => format!("CLICK({x}, {y})"),
        Action::ClickTarget { element } => format!("CLICK({element})"),
        Action::Scroll(dir) => format!("SCROLL({dir})"),
        Action::Type { text } => format!("TYPE({text})"),
        Action::Back => "BACK".to_string(),
        Action::Exit => "EXIT".to_string(),
        Action::Wait { seconds } => format!("WAIT({seconds})"),
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_action(self))
    }
}

impl std::str::FromStr for Action {
    type Err = ParseActionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_action(s)
    }
}

// Actions travel through dataset files and transcripts in their canonical
// string form, so serde goes through the grammar rather than a derive.
impl Serialize for Action {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&render_action(self))
    }
}

impl<'de> Deserialize<'de> for Action {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        parse_action(&raw).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_coordinate_click() {
        assert_eq!(
            parse_action("CLICK(200, 300)").unwrap(),
            Action::Click { x: 200, y: 300 }
        );
    }

    #[test]
    fn parses_target_click() {
        assert_eq!(
            parse_action("CLICK(Search Bar)").unwrap(),
            Action::ClickTarget {
                element: "Search Bar".to_string()
            }
        );
    }

    #[test]
    fn parses_bare_exit_and_back() {
        assert_eq!(parse_action("EXIT").unwrap(), Action::Exit);
        assert_eq!(parse_action("back").unwrap(), Action::Back);
        assert_eq!(parse_action("BACK()").unwrap(), Action::Back);
    }

    #[test]
    fn parses_scroll_directions() {
        assert_eq!(
            parse_action("SCROLL(up)").unwrap(),
            Action::Scroll(ScrollDirection::Up)
        );
        assert_eq!(
            parse_action("scroll(RIGHT)").unwrap(),
            Action::Scroll(ScrollDirection::Right)
        );
    }

    #[test]
    fn single_integer_click_is_arity_mismatch() {
        assert!(matches!(
            parse_action("CLICK(200)"),
            Err(ParseActionError::ArityMismatch { keyword: "CLICK", .. })
        ));
    }

    #[test]
    fn unknown_head_is_rejected() {
        assert!(matches!(
            parse_action("SWIPE(up)"),
            Err(ParseActionError::UnknownActionName(name)) if name == "SWIPE"
        ));
    }

    #[test]
    fn bad_direction_and_bad_wait_are_attribute_errors() {
        assert!(matches!(
            parse_action("SCROLL(sideways)"),
            Err(ParseActionError::BadAttribute { keyword: "SCROLL", .. })
        ));
        assert!(matches!(
            parse_action("WAIT(0)"),
            Err(ParseActionError::BadAttribute { keyword: "WAIT", .. })
        ));
        assert!(matches!(
            parse_action("WAIT(-3)"),
            Err(ParseActionError::BadAttribute { keyword: "WAIT", .. })
        ));
        assert!(matches!(
            parse_action("CLICK(200, abc)"),
            Err(ParseActionError::BadAttribute { keyword: "CLICK", .. })
        ));
    }

    #[test]
    fn type_keeps_interior_verbatim_including_commas() {
        assert_eq!(
            parse_action("TYPE(hello, world)").unwrap(),
            Action::Type {
                text: "hello, world".to_string()
            }
        );
    }

    #[test]
    fn renders_match_spec_examples() {
        assert_eq!(render_action(&Action::Click { x: 200, y: 300 }), "CLICK(200, 300)");
        assert_eq!(render_action(&Action::Wait { seconds: 2 }), "WAIT(2)");
        assert_eq!(
            render_action(&Action::ClickTarget {
                element: "Search Bar".to_string()
            }),
            "CLICK(Search Bar)"
        );
        assert_eq!(render_action(&Action::Scroll(ScrollDirection::Up)), "SCROLL(up)");
    }

    #[test]
    fn serde_round_trips_through_the_grammar() {
        let action = Action::Type {
            text: "Bob".to_string(),
        };
        let json = serde_json::to_string(&action).unwrap();
        assert_eq!(json, "\"TYPE(Bob)\"");
        let back: Action = serde_json::from_str(&json).unwrap();
        assert_eq!(back, action);
    }

    #[test]
    fn missing_close_paren_reports_bad_attribute() {
        assert!(matches!(
            parse_action("CLICK(200, 300"),
            Err(ParseActionError::BadAttribute { .. })
        ));
    }

    /// Element names the grammar can round-trip: trimmed, single-line,
    /// comma-free, and not a bare integer.
    fn element_name() -> impl Strategy<Value = String> {
        "[A-Za-z][A-Za-z0-9 ]{0,18}[A-Za-z0-9]".prop_map(|s| s.trim().to_string())
    }

    fn arb_action() -> impl Strategy<Value = Action> {
        prop_oneof![
            (-5000i64..5000, -5000i64..5000).prop_map(|(x, y)| Action::Click { x, y }),
            element_name().prop_map(|element| Action::ClickTarget { element }),
            prop_oneof![
                Just(ScrollDirection::Up),
                Just(ScrollDirection::Down),
                Just(ScrollDirection::Left),
                Just(ScrollDirection::Right)
            ]
            .prop_map(Action::Scroll),
            "[ -~]{0,24}".prop_map(|text| Action::Type { text }),
            Just(Action::Back),
            Just(Action::Exit),
            (1u32..3600).prop_map(|seconds| Action::Wait { seconds }),
        ]
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(action in arb_action()) {
            let rendered = render_action(&action);
            let parsed = parse_action(&rendered).unwrap();
            // TYPE interiors are verbatim; everything else is exact too.
            prop_assert_eq!(parsed, action);
        }

        #[test]
        fn unknown_heads_always_rejected(head in "[A-Za-z]{1,10}", args in "[a-z0-9, ]{0,10}") {
            prop_assume!(!KEYWORDS.iter().any(|k| head.eq_ignore_ascii_case(k)));
            let candidate = format!("{head}({args})");
            prop_assert!(matches!(
                parse_action(&candidate),
                Err(ParseActionError::UnknownActionName(_))
            ));
        }
    }
}
