//! Line-based text documents for trees, barcodes and paths, and SVG
//! rendering.
//!
//! Every document starts with a header line naming the format and version.
//! Blank lines and everything after `#` are ignored.
//!
//! ```text
//! mergetree v1
//! # id parent height
//! 0 2 0
//! 1 2 1
//! 2 null 3
//! ```
//!
//! Barcodes (`barcode v1`) hold one `birth death` pair per line, with
//! `null` for an infinite death. Paths (`mergepath v1`) hold `waypoint t`
//! lines, each followed by the node lines of its tree.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::barcode::{Barcode, Interval};
use crate::error::{Error, Result};
use crate::paths::DiscretePath;
use crate::tree::{validate, MergeTree, RawNode};

pub const TREE_HEADER: &str = "mergetree v1";
pub const BARCODE_HEADER: &str = "barcode v1";
pub const PATH_HEADER: &str = "mergepath v1";

/// Formats `x` with 17 significant digits, dropping trailing zeros, so that
/// parsing the text gives back the same `f64`. Infinities print as `inf`
/// and `-inf`.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", strip_zeros(mantissa))
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn syntax(line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        field: field.into(),
        message: message.into(),
    }
}

/// Meaningful lines with their 1-based numbers and whitespace-split fields.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    header: &str,
) -> Result<()> {
    match lines.next() {
        Some((_, fields)) if fields.join(" ") == header => Ok(()),
        Some((line, fields)) => Err(syntax(
            line,
            "header",
            format!("expected `{header}`, found `{}`", fields.join(" ")),
        )),
        None => Err(syntax(
            1,
            "header",
            format!("expected `{header}`, found nothing"),
        )),
    }
}

fn parse_number(line: usize, field: &str, text: &str) -> Result<f64> {
    match text {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => text
            .parse::<f64>()
            .map_err(|_| syntax(line, field, format!("`{text}` is not a number"))),
    }
}

fn field<'a>(fields: &[&'a str], index: usize, line: usize, name: &str) -> Result<&'a str> {
    fields
        .get(index)
        .copied()
        .ok_or_else(|| syntax(line, name, format!("missing field `{name}`")))
}

/// Collects node lines `id parent height` into a tree. Ids are arbitrary
/// distinct unsigned integers.
struct TreeBuilder {
    ids: HashMap<u64, usize>,
    records: Vec<(usize, Option<u64>, f64)>,
}

impl TreeBuilder {
    fn new() -> Self {
        Self {
            ids: HashMap::new(),
            records: Vec::new(),
        }
    }

    fn push(&mut self, line: usize, fields: &[&str]) -> Result<()> {
        let id_text = field(fields, 0, line, "id")?;
        let parent_text = field(fields, 1, line, "parent")?;
        let height_text = field(fields, 2, line, "height")?;
        if fields.len() > 3 {
            return Err(syntax(line, "height", "unexpected trailing fields"));
        }
        let id: u64 = id_text
            .parse()
            .map_err(|_| syntax(line, "id", format!("`{id_text}` is not a node id")))?;
        let parent = match parent_text {
            "null" => None,
            p => Some(
                p.parse::<u64>()
                    .map_err(|_| syntax(line, "parent", format!("`{p}` is not a node id")))?,
            ),
        };
        let height = parse_number(line, "height", height_text)?;
        if self.ids.insert(id, self.records.len()).is_some() {
            return Err(syntax(line, "id", format!("node id {id} appears twice")));
        }
        self.records.push((line, parent, height));
        Ok(())
    }

    fn finish(self, line: usize) -> Result<MergeTree> {
        if self.records.is_empty() {
            return Err(syntax(line, "id", "the tree has no nodes"));
        }
        let raw = self
            .records
            .iter()
            .map(|&(line, parent, height)| {
                let parent = match parent {
                    None => None,
                    Some(p) => Some(*self.ids.get(&p).ok_or_else(|| {
                        syntax(line, "parent", format!("node id {p} is not defined"))
                    })?),
                };
                Ok(RawNode { height, parent })
            })
            .collect::<Result<Vec<_>>>()?;
        validate(&raw)
    }
}

fn push_tree_lines(out: &mut String, t: &MergeTree) {
    for (id, node) in t.to_raw().iter().enumerate() {
        let parent = node.parent.map_or("null".to_string(), |p| p.to_string());
        let _ = writeln!(out, "{id} {parent} {}", format_f64(node.height));
    }
}

pub fn parse_tree(text: &str) -> Result<MergeTree> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, TREE_HEADER)?;
    let mut builder = TreeBuilder::new();
    let mut last = 1;
    for (line, fields) in lines {
        builder.push(line, &fields)?;
        last = line;
    }
    builder.finish(last)
}

pub fn write_tree(t: &MergeTree) -> String {
    let mut out = format!("{TREE_HEADER}\n");
    push_tree_lines(&mut out, t);
    out
}

pub fn parse_barcode(text: &str) -> Result<Barcode> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, BARCODE_HEADER)?;
    let mut intervals = Vec::new();
    for (line, fields) in lines {
        let birth = parse_number(line, "birth", field(&fields, 0, line, "birth")?)?;
        let death = match field(&fields, 1, line, "death")? {
            "null" => f64::INFINITY,
            d => parse_number(line, "death", d)?,
        };
        if fields.len() > 2 {
            return Err(syntax(line, "death", "unexpected trailing fields"));
        }
        intervals.push(Interval::new(birth, death)?);
    }
    Ok(Barcode::new(intervals))
}

pub fn write_barcode(b: &Barcode) -> String {
    let mut out = format!("{BARCODE_HEADER}\n");
    for iv in &b.intervals {
        let death = if iv.is_infinite() {
            "null".to_string()
        } else {
            format_f64(iv.death)
        };
        let _ = writeln!(out, "{} {death}", format_f64(iv.birth));
    }
    out
}

pub fn parse_path(text: &str) -> Result<DiscretePath> {
    let mut lines = content_lines(text);
    expect_header(&mut lines, PATH_HEADER)?;
    let mut waypoints = Vec::new();
    let mut current: Option<(f64, TreeBuilder, usize)> = None;
    for (line, fields) in lines {
        if fields[0] == "waypoint" {
            let t = parse_number(line, "waypoint", field(&fields, 1, line, "waypoint")?)?;
            if let Some((t, builder, start)) = current.take() {
                waypoints.push((t, builder.finish(start)?));
            }
            current = Some((t, TreeBuilder::new(), line));
        } else {
            match current.as_mut() {
                Some((_, builder, _)) => builder.push(line, &fields)?,
                None => return Err(syntax(line, "waypoint", "node line before any waypoint")),
            }
        }
    }
    if let Some((t, builder, start)) = current {
        waypoints.push((t, builder.finish(start)?));
    }
    DiscretePath::new(waypoints)
}

pub fn write_path(p: &DiscretePath) -> String {
    let mut out = format!("{PATH_HEADER}\n");
    for (t, tree) in p.waypoints() {
        let _ = writeln!(out, "waypoint {}", format_f64(*t));
        push_tree_lines(&mut out, tree);
    }
    out
}

const SVG_WIDTH: f64 = 480.0;
const SVG_HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;

fn svg_open(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = width,
        h = height
    );
}

/// Short coordinate text for the SVG output.
fn coord(x: f64) -> String {
    let s = format!("{x:.2}");
    strip_zeros(&s)
}

/// Draws the tree with height increasing upwards. Leaves are spread evenly
/// in depth-first order; an inner node sits above the mean of its
/// children. The ray above the root extends to the top margin.
pub fn render_tree_svg(t: &MergeTree) -> String {
    let lo = t.min_height();
    let span = (t.root_height() - lo).max(1e-12);
    let plot = SVG_HEIGHT - 2.0 * MARGIN - 20.0;
    let y = |h: f64| SVG_HEIGHT - MARGIN - (h - lo) / span * plot;

    let mut x = vec![0.0; t.node_count()];
    let mut order = Vec::new();
    let mut stack = vec![(t.root(), false)];
    while let Some((v, done)) = stack.pop() {
        if done {
            order.push(v);
            continue;
        }
        stack.push((v, true));
        for &c in t.children(v).iter().rev() {
            stack.push((c, false));
        }
    }
    let step = (SVG_WIDTH - 2.0 * MARGIN) / t.leaf_count().max(2) as f64;
    let mut next_leaf = 0.0;
    for &v in &order {
        x[v] = if t.is_leaf(v) {
            next_leaf += 1.0;
            MARGIN + (next_leaf - 0.5) * step
        } else {
            let cs = t.children(v);
            cs.iter().map(|&c| x[c]).sum::<f64>() / cs.len() as f64
        };
    }

    let mut out = String::new();
    svg_open(&mut out, SVG_WIDTH, SVG_HEIGHT);
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="2" fill="none">"#);
    for &v in &order {
        if let Some(p) = t.parent(v) {
            let _ = writeln!(
                out,
                r#"<polyline points="{},{} {},{} {},{}"/>"#,
                coord(x[v]),
                coord(y(t.height(v))),
                coord(x[v]),
                coord(y(t.height(p))),
                coord(x[p]),
                coord(y(t.height(p)))
            );
        }
    }
    let root = t.root();
    let _ = writeln!(
        out,
        r#"<line class="ray" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
        coord(x[root]),
        coord(y(t.height(root))),
        coord(x[root]),
        coord(MARGIN / 2.0)
    );
    let _ = writeln!(out, "</g>");
    for &l in t.leaves() {
        let _ = writeln!(
            out,
            r#"<circle class="leaf" cx="{}" cy="{}" r="4"/>"#,
            coord(x[l]),
            coord(y(t.height(l)))
        );
    }
    let _ = writeln!(out, "</svg>");
    out
}

/// Draws one horizontal bar per interval, sorted by birth. Infinite bars
/// run to the right margin and end in an arrowhead.
pub fn render_barcode_svg(b: &Barcode) -> String {
    let bars = b.sorted();
    let finite = bars
        .iter()
        .flat_map(|iv| [iv.birth, iv.death])
        .filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), v| {
        (a.min(v), c.max(v))
    });
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 1.0) };
    let span = (hi - lo).max(1e-12);
    let plot = SVG_WIDTH - 2.0 * MARGIN - 30.0;
    let x = |v: f64| MARGIN + (v - lo) / span * plot;
    let row = 16.0;
    let height = 2.0 * MARGIN + row * bars.len() as f64;

    let mut out = String::new();
    svg_open(&mut out, SVG_WIDTH, height);
    let _ = writeln!(
        out,
        r#"<defs><marker id="arrow" viewBox="0 0 10 10" refX="5" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z"/></marker></defs>"#
    );
    let _ = writeln!(out, r#"<g stroke="black" stroke-width="4">"#);
    for (k, iv) in bars.iter().enumerate() {
        let yy = coord(MARGIN + row * (k as f64 + 0.5));
        if iv.is_infinite() {
            let _ = writeln!(
                out,
                r#"<line class="infinite" x1="{}" y1="{yy}" x2="{}" y2="{yy}" marker-end="url(#arrow)"/>"#,
                coord(x(iv.birth)),
                coord(SVG_WIDTH - MARGIN)
            );
        } else {
            let _ = writeln!(
                out,
                r#"<line x1="{}" y1="{yy}" x2="{}" y2="{yy}"/>"#,
                coord(x(iv.birth)),
                coord(x(iv.death))
            );
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}
