//! The text format for bundles and sections.
//!
//! A document is a sequence of whitespace-separated token lines. `#`
//! starts a comment, blank lines are ignored. The header comes first,
//! the groupoid block next, then fibers, multiplication and involution
//! coefficients, then named sections:
//!
//! ```text
//! fellbundle format 1
//! groupoid elements 2
//! groupoid units 0
//! groupoid range 0 0
//! groupoid source 0 0
//! groupoid inverse 0 1
//! groupoid compose 0 0 0
//! groupoid compose 0 1 1
//! groupoid compose 1 0 1
//! groupoid compose 1 1 0
//! fiber unit 0 blocks 1
//! fiber arrow 1 dim 1
//! mult 0 1 0 0 0 1,0
//! mult 1 0 0 0 0 1,0
//! mult 1 1 0 0 0 1,0
//! star 1 0 0 1,0
//! section f at 0 1,0
//! section f at 1 0,1
//! ```
//!
//! Complex scalars are decimal pairs `re,im`, emitted with the shortest
//! representation that parses back to the same double, so canonical
//! documents round-trip bit-exactly. Unit fibers are block-diagonal sums
//! of full matrix algebras given by their block dimensions; their product
//! and involution tensors are derived, never stored. Multiplication
//! lines give sparse tensor coefficients `g h i j k value`, involution
//! lines `g row col value`. Unknown keys are rejected.

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::convalg::Section;
use crate::fellbundle::{BundleError, BundleParts, FellBundle, MultTensor};
use crate::groupoid::FiniteGroupoid;
use crate::matalg::{ComplexMatrix, MatrixStarAlgebra};
use crate::reps::StarRepresentation;
use crate::tol::Tolerances;

/// First-error diagnostic with 1-based line and column.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

fn err<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        col,
        message: message.into(),
    })
}

/// Sparse tensor coefficient `(i, j, k, value)`.
pub type MultCoeff = (usize, usize, usize, Complex64);
/// Sparse involution coefficient `(row, col, value)`.
pub type StarCoeff = (usize, usize, Complex64);

/// Parsed form of a bundle file: plain data, normalized (sorted keys,
/// exact-zero coefficients dropped), so documents compare structurally.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BundleDocument {
    pub n_elements: usize,
    pub units: Vec<usize>,
    pub range_of: Vec<usize>,
    pub source_of: Vec<usize>,
    pub inverse_of: Vec<usize>,
    pub compose: Vec<(usize, usize, usize)>,
    pub unit_blocks: BTreeMap<usize, Vec<usize>>,
    pub arrow_dims: BTreeMap<usize, usize>,
    pub mult_coeffs: BTreeMap<(usize, usize), Vec<MultCoeff>>,
    pub star_coeffs: BTreeMap<usize, Vec<StarCoeff>>,
    pub sections: BTreeMap<String, BTreeMap<usize, Vec<Complex64>>>,
}

struct Token<'t> {
    col: usize,
    text: &'t str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut col = 1;
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    col,
                    text: &line[s..i],
                });
            }
        } else if start.is_none() {
            start = Some(i);
            col = i + 1;
        }
    }
    if let Some(s) = start {
        let end = line.find('#').unwrap_or(line.len());
        out.push(Token {
            col,
            text: line[s..end].trim_end(),
        });
    }
    out
}

fn parse_usize(tok: &Token<'_>, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.text
        .parse::<usize>()
        .map_err(|_| ParseError {
            line,
            col: tok.col,
            message: format!("expected {what}, found {:?}", tok.text),
        })
}

fn parse_complex(tok: &Token<'_>, line: usize) -> Result<Complex64, ParseError> {
    let bad = || ParseError {
        line,
        col: tok.col,
        message: format!("expected complex pair re,im, found {:?}", tok.text),
    };
    let (re, im) = tok.text.split_once(',').ok_or_else(bad)?;
    let re = re.parse::<f64>().map_err(|_| bad())?;
    let im = im.parse::<f64>().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

fn format_complex(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

/// Parse a document, reporting the first error with line and column.
/// Element indices, dimensions and coefficient bounds are validated;
/// mathematical laws are not (that is the job of the check command).
pub fn parse_bundle_file(text: &str) -> Result<BundleDocument, ParseError> {
    let mut doc = BundleDocument::default();
    let mut saw_header = false;
    let mut saw_elements = false;
    let mut saw_units = false;
    let mut groupoid_done = false;
    let mut fibers_done = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let key = tokens[0].text;
        if !saw_header {
            if key != "fellbundle" {
                return err(line, tokens[0].col, "expected header line `fellbundle format 1`");
            }
            if tokens.len() != 3 || tokens[1].text != "format" {
                return err(line, tokens[0].col, "malformed header; expected `fellbundle format 1`");
            }
            if tokens[2].text != "1" {
                return err(
                    line,
                    tokens[2].col,
                    format!("unsupported format version {:?}", tokens[2].text),
                );
            }
            saw_header = true;
            continue;
        }
        match key {
            "groupoid" => {
                if groupoid_done {
                    return err(
                        line,
                        tokens[0].col,
                        "groupoid block must precede fiber, mult, star and section lines",
                    );
                }
                parse_groupoid_line(&mut doc, &tokens, line, &mut saw_elements, &mut saw_units)?;
            }
            "fiber" => {
                if !saw_elements {
                    return err(line, tokens[0].col, "fiber line before `groupoid elements`");
                }
                if fibers_done {
                    return err(
                        line,
                        tokens[0].col,
                        "fiber lines must precede mult, star and section lines",
                    );
                }
                groupoid_done = true;
                parse_fiber_line(&mut doc, &tokens, line)?;
            }
            "mult" => {
                if !saw_elements {
                    return err(line, tokens[0].col, "mult line before `groupoid elements`");
                }
                groupoid_done = true;
                fibers_done = true;
                parse_mult_line(&mut doc, &tokens, line)?;
            }
            "star" => {
                if !saw_elements {
                    return err(line, tokens[0].col, "star line before `groupoid elements`");
                }
                groupoid_done = true;
                fibers_done = true;
                parse_star_line(&mut doc, &tokens, line)?;
            }
            "section" => {
                if !saw_elements {
                    return err(line, tokens[0].col, "section line before `groupoid elements`");
                }
                groupoid_done = true;
                fibers_done = true;
                parse_section_line(&mut doc, &tokens, line)?;
            }
            other => {
                return err(line, tokens[0].col, format!("unknown key {other:?}"));
            }
        }
    }
    if !saw_header {
        return err(1, 1, "empty document (missing `fellbundle format 1` header)");
    }
    if !saw_elements {
        return err(1, 1, "missing `groupoid elements` line");
    }
    if !saw_units {
        return err(1, 1, "missing `groupoid units` line");
    }
    for (what, arr) in [
        ("range", &doc.range_of),
        ("source", &doc.source_of),
        ("inverse", &doc.inverse_of),
    ] {
        if arr.len() != doc.n_elements {
            return err(
                1,
                1,
                format!(
                    "groupoid {what} array has {} entries, expected {}",
                    arr.len(),
                    doc.n_elements
                ),
            );
        }
    }
    // every element needs a declared fiber
    for g in 0..doc.n_elements {
        let is_unit = doc.units.contains(&g);
        if is_unit && !doc.unit_blocks.contains_key(&g) {
            return err(1, 1, format!("unit {g} has no `fiber unit` line"));
        }
        if !is_unit && !doc.arrow_dims.contains_key(&g) {
            return err(1, 1, format!("element {g} has no `fiber arrow` line"));
        }
    }
    normalize(&mut doc);
    Ok(doc)
}

fn parse_groupoid_line(
    doc: &mut BundleDocument,
    tokens: &[Token<'_>],
    line: usize,
    saw_elements: &mut bool,
    saw_units: &mut bool,
) -> Result<(), ParseError> {
    if tokens.len() < 2 {
        return err(line, tokens[0].col, "truncated groupoid line");
    }
    let sub = tokens[1].text;
    let need_elements = |flag: bool| -> Result<(), ParseError> {
        if !flag {
            err(line, tokens[1].col, "`groupoid elements` must come first")
        } else {
            Ok(())
        }
    };
    match sub {
        "elements" => {
            if *saw_elements {
                return err(line, tokens[1].col, "duplicate `groupoid elements` line");
            }
            if tokens.len() != 3 {
                return err(line, tokens[1].col, "expected `groupoid elements <n>`");
            }
            doc.n_elements = parse_usize(&tokens[2], line, "element count")?;
            *saw_elements = true;
        }
        "units" => {
            need_elements(*saw_elements)?;
            if *saw_units {
                return err(line, tokens[1].col, "duplicate `groupoid units` line");
            }
            for t in &tokens[2..] {
                let u = parse_usize(t, line, "unit index")?;
                if u >= doc.n_elements {
                    return err(line, t.col, format!("unit {u} out of range ({} elements)", doc.n_elements));
                }
                doc.units.push(u);
            }
            *saw_units = true;
        }
        "range" | "source" | "inverse" => {
            need_elements(*saw_elements)?;
            let target = match sub {
                "range" => &mut doc.range_of,
                "source" => &mut doc.source_of,
                _ => &mut doc.inverse_of,
            };
            if !target.is_empty() {
                return err(line, tokens[1].col, format!("duplicate `groupoid {sub}` line"));
            }
            if tokens.len() - 2 != doc.n_elements {
                return err(
                    line,
                    tokens[1].col,
                    format!("expected {} entries, found {}", doc.n_elements, tokens.len() - 2),
                );
            }
            for t in &tokens[2..] {
                let v = parse_usize(t, line, "element index")?;
                if v >= doc.n_elements {
                    return err(line, t.col, format!("element {v} out of range ({} elements)", doc.n_elements));
                }
                target.push(v);
            }
        }
        "compose" => {
            need_elements(*saw_elements)?;
            if tokens.len() != 5 {
                return err(line, tokens[1].col, "expected `groupoid compose <g> <h> <gh>`");
            }
            let mut vals = [0usize; 3];
            for (slot, t) in vals.iter_mut().zip(&tokens[2..]) {
                let v = parse_usize(t, line, "element index")?;
                if v >= doc.n_elements {
                    return err(
                        line,
                        t.col,
                        format!("element {v} out of range ({} elements)", doc.n_elements),
                    );
                }
                *slot = v;
            }
            if doc
                .compose
                .iter()
                .any(|&(g, h, _)| g == vals[0] && h == vals[1])
            {
                return err(
                    line,
                    tokens[2].col,
                    format!("duplicate composition entry for pair ({},{})", vals[0], vals[1]),
                );
            }
            doc.compose.push((vals[0], vals[1], vals[2]));
        }
        other => {
            return err(line, tokens[1].col, format!("unknown groupoid key {other:?}"));
        }
    }
    Ok(())
}

fn parse_fiber_line(
    doc: &mut BundleDocument,
    tokens: &[Token<'_>],
    line: usize,
) -> Result<(), ParseError> {
    if tokens.len() < 4 {
        return err(line, tokens[0].col, "truncated fiber line");
    }
    match tokens[1].text {
        "unit" => {
            let u = parse_usize(&tokens[2], line, "unit index")?;
            if !doc.units.contains(&u) {
                return err(line, tokens[2].col, format!("element {u} is not a unit"));
            }
            if tokens[3].text != "blocks" {
                return err(line, tokens[3].col, "expected `blocks`");
            }
            if doc.unit_blocks.contains_key(&u) {
                return err(line, tokens[2].col, format!("duplicate fiber line for unit {u}"));
            }
            let mut blocks = Vec::new();
            for t in &tokens[4..] {
                let d = parse_usize(t, line, "block dimension")?;
                if d == 0 {
                    return err(line, t.col, "block dimensions must be positive");
                }
                blocks.push(d);
            }
            doc.unit_blocks.insert(u, blocks);
        }
        "arrow" => {
            let g = parse_usize(&tokens[2], line, "element index")?;
            if g >= doc.n_elements {
                return err(line, tokens[2].col, format!("element {g} out of range ({} elements)", doc.n_elements));
            }
            if doc.units.contains(&g) {
                return err(line, tokens[2].col, format!("element {g} is a unit; use `fiber unit`"));
            }
            if tokens[3].text != "dim" {
                return err(line, tokens[3].col, "expected `dim`");
            }
            if tokens.len() != 5 {
                return err(line, tokens[0].col, "expected `fiber arrow <g> dim <k>`");
            }
            if doc.arrow_dims.contains_key(&g) {
                return err(line, tokens[2].col, format!("duplicate fiber line for element {g}"));
            }
            let d = parse_usize(&tokens[4], line, "fiber dimension")?;
            doc.arrow_dims.insert(g, d);
        }
        other => return err(line, tokens[1].col, format!("unknown fiber key {other:?}")),
    }
    Ok(())
}

fn fiber_dim_of(doc: &BundleDocument, g: usize) -> usize {
    if let Some(blocks) = doc.unit_blocks.get(&g) {
        blocks.iter().map(|d| d * d).sum()
    } else {
        doc.arrow_dims.get(&g).copied().unwrap_or(0)
    }
}

fn parse_mult_line(
    doc: &mut BundleDocument,
    tokens: &[Token<'_>],
    line: usize,
) -> Result<(), ParseError> {
    if tokens.len() != 7 {
        return err(line, tokens[0].col, "expected `mult <g> <h> <i> <j> <k> <re,im>`");
    }
    let g = parse_usize(&tokens[1], line, "element index")?;
    let h = parse_usize(&tokens[2], line, "element index")?;
    for (v, t) in [(g, &tokens[1]), (h, &tokens[2])] {
        if v >= doc.n_elements {
            return err(line, t.col, format!("element {v} out of range ({} elements)", doc.n_elements));
        }
    }
    if doc.units.contains(&g) && doc.units.contains(&h) {
        return err(
            line,
            tokens[1].col,
            "unit-fiber products are derived from blocks; mult lines on unit pairs are not allowed",
        );
    }
    let Some(&(_, _, gh)) = doc.compose.iter().find(|&&(a, b, _)| a == g && b == h) else {
        return err(line, tokens[1].col, format!("pair ({g},{h}) is not in the composition table"));
    };
    let (di, dj, dk) = (fiber_dim_of(doc, g), fiber_dim_of(doc, h), fiber_dim_of(doc, gh));
    let i = parse_usize(&tokens[3], line, "coefficient index")?;
    let j = parse_usize(&tokens[4], line, "coefficient index")?;
    let k = parse_usize(&tokens[5], line, "coefficient index")?;
    for (v, d, t) in [(i, di, &tokens[3]), (j, dj, &tokens[4]), (k, dk, &tokens[5])] {
        if v >= d {
            return err(line, t.col, format!("coefficient index {v} out of range (dimension {d})"));
        }
    }
    let value = parse_complex(&tokens[6], line)?;
    let entry = doc.mult_coeffs.entry((g, h)).or_default();
    if entry.iter().any(|&(a, b, c, _)| (a, b, c) == (i, j, k)) {
        return err(line, tokens[3].col, format!("duplicate mult coefficient ({g},{h}) [{i},{j},{k}]"));
    }
    entry.push((i, j, k, value));
    Ok(())
}

fn parse_star_line(
    doc: &mut BundleDocument,
    tokens: &[Token<'_>],
    line: usize,
) -> Result<(), ParseError> {
    if tokens.len() != 5 {
        return err(line, tokens[0].col, "expected `star <g> <row> <col> <re,im>`");
    }
    let g = parse_usize(&tokens[1], line, "element index")?;
    if g >= doc.n_elements {
        return err(line, tokens[1].col, format!("element {g} out of range ({} elements)", doc.n_elements));
    }
    if doc.units.contains(&g) {
        return err(
            line,
            tokens[1].col,
            "unit-fiber involutions are derived from blocks; star lines on units are not allowed",
        );
    }
    if g >= doc.inverse_of.len() {
        return err(line, tokens[1].col, "star line requires the groupoid inverse array");
    }
    let inv = doc.inverse_of[g];
    let rows = fiber_dim_of(doc, inv);
    let cols = fiber_dim_of(doc, g);
    let r = parse_usize(&tokens[2], line, "row index")?;
    let c = parse_usize(&tokens[3], line, "column index")?;
    if r >= rows {
        return err(line, tokens[2].col, format!("row {r} out of range (dimension {rows})"));
    }
    if c >= cols {
        return err(line, tokens[3].col, format!("column {c} out of range (dimension {cols})"));
    }
    let value = parse_complex(&tokens[4], line)?;
    let entry = doc.star_coeffs.entry(g).or_default();
    if entry.iter().any(|&(a, b, _)| (a, b) == (r, c)) {
        return err(line, tokens[2].col, format!("duplicate star coefficient for {g} [{r},{c}]"));
    }
    entry.push((r, c, value));
    Ok(())
}

fn parse_section_line(
    doc: &mut BundleDocument,
    tokens: &[Token<'_>],
    line: usize,
) -> Result<(), ParseError> {
    if tokens.len() < 4 || tokens[2].text != "at" {
        return err(line, tokens[0].col, "expected `section <name> at <g> <coords...>`");
    }
    let name = tokens[1].text.to_string();
    let g = parse_usize(&tokens[3], line, "element index")?;
    if g >= doc.n_elements {
        return err(line, tokens[3].col, format!("element {g} out of range ({} elements)", doc.n_elements));
    }
    let dim = fiber_dim_of(doc, g);
    if tokens.len() - 4 != dim {
        return err(
            line,
            tokens[0].col,
            format!("section {name:?} at {g}: expected {dim} coordinates, found {}", tokens.len() - 4),
        );
    }
    let mut coords = Vec::with_capacity(dim);
    for t in &tokens[4..] {
        coords.push(parse_complex(t, line)?);
    }
    let entry = doc.sections.entry(name.clone()).or_default();
    if entry.contains_key(&g) {
        return err(line, tokens[3].col, format!("duplicate section value {name:?} at {g}"));
    }
    entry.insert(g, coords);
    Ok(())
}

fn normalize(doc: &mut BundleDocument) {
    doc.units.sort_unstable();
    doc.units.dedup();
    doc.compose.sort_unstable();
    for coeffs in doc.mult_coeffs.values_mut() {
        coeffs.retain(|&(_, _, _, v)| v != Complex64::new(0.0, 0.0));
        coeffs.sort_by_key(|&(i, j, k, _)| (i, j, k));
    }
    doc.mult_coeffs.retain(|_, v| !v.is_empty());
    for coeffs in doc.star_coeffs.values_mut() {
        coeffs.retain(|&(_, _, v)| v != Complex64::new(0.0, 0.0));
        coeffs.sort_by_key(|&(r, c, _)| (r, c));
    }
    doc.star_coeffs.retain(|_, v| !v.is_empty());
    for values in doc.sections.values_mut() {
        values.retain(|_, coords| coords.iter().any(|&v| v != Complex64::new(0.0, 0.0)));
    }
    doc.sections.retain(|_, v| !v.is_empty());
}

/// Emit the canonical text of a document. `parse(emit(doc)) == doc` for
/// normalized documents, bit-exactly.
pub fn emit_bundle_file(doc: &BundleDocument) -> String {
    let mut out = String::new();
    out.push_str("fellbundle format 1\n");
    out.push_str(&format!("groupoid elements {}\n", doc.n_elements));
    out.push_str("groupoid units");
    for u in &doc.units {
        out.push_str(&format!(" {u}"));
    }
    out.push('\n');
    for (name, arr) in [
        ("range", &doc.range_of),
        ("source", &doc.source_of),
        ("inverse", &doc.inverse_of),
    ] {
        out.push_str(&format!("groupoid {name}"));
        for v in arr {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    for &(g, h, gh) in &doc.compose {
        out.push_str(&format!("groupoid compose {g} {h} {gh}\n"));
    }
    for (u, blocks) in &doc.unit_blocks {
        out.push_str(&format!("fiber unit {u} blocks"));
        for d in blocks {
            out.push_str(&format!(" {d}"));
        }
        out.push('\n');
    }
    for (g, d) in &doc.arrow_dims {
        out.push_str(&format!("fiber arrow {g} dim {d}\n"));
    }
    for (&(g, h), coeffs) in &doc.mult_coeffs {
        for &(i, j, k, v) in coeffs {
            out.push_str(&format!("mult {g} {h} {i} {j} {k} {}\n", format_complex(v)));
        }
    }
    for (&g, coeffs) in &doc.star_coeffs {
        for &(r, c, v) in coeffs {
            out.push_str(&format!("star {g} {r} {c} {}\n", format_complex(v)));
        }
    }
    for (name, values) in &doc.sections {
        for (g, coords) in values {
            out.push_str(&format!("section {name} at {g}"));
            for &v in coords {
                out.push_str(&format!(" {}", format_complex(v)));
            }
            out.push('\n');
        }
    }
    out
}

impl BundleDocument {
    /// Build the runtime objects the document describes. The groupoid and
    /// bundle are assembled without mathematical validation so that the
    /// check command can diagnose broken files; run the groupoid and
    /// axiom checks afterwards.
    pub fn to_bundle(&self, tol: &Tolerances) -> Result<FellBundle, BundleError> {
        let groupoid = FiniteGroupoid::from_parts(
            self.n_elements,
            self.units.clone(),
            self.range_of.clone(),
            self.source_of.clone(),
            self.inverse_of.clone(),
            &self.compose,
        );
        let mut unit_fibers = BTreeMap::new();
        let mut fiber_dims = vec![0usize; self.n_elements];
        for (&u, blocks) in &self.unit_blocks {
            let alg = MatrixStarAlgebra::block_diagonal(blocks, tol)?;
            fiber_dims[u] = alg.dim();
            unit_fibers.insert(u, alg);
        }
        for (&g, &d) in &self.arrow_dims {
            fiber_dims[g] = d;
        }

        let mut mult = BTreeMap::new();
        for &(g, h, gh) in &self.compose {
            let tensor = if g == h && self.unit_blocks.contains_key(&g) && gh == g {
                algebra_mult_tensor(&unit_fibers[&g])
            } else {
                let mut t = MultTensor::zero(fiber_dims[g], fiber_dims[h], fiber_dims[gh]);
                if let Some(coeffs) = self.mult_coeffs.get(&(g, h)) {
                    for &(i, j, k, v) in coeffs {
                        t.set(i, j, k, v);
                    }
                }
                t
            };
            mult.insert((g, h), tensor);
        }

        let mut star = BTreeMap::new();
        for g in 0..self.n_elements {
            let s = if let Some(alg) = unit_fibers.get(&g) {
                algebra_star_matrix(alg)
            } else {
                let inv = self.inverse_of[g];
                let mut m = ComplexMatrix::zeros(fiber_dims[inv], fiber_dims[g]);
                if let Some(coeffs) = self.star_coeffs.get(&g) {
                    for &(r, c, v) in coeffs {
                        m.set(r, c, v);
                    }
                }
                m
            };
            star.insert(g, s);
        }

        Ok(FellBundle::from_parts(BundleParts {
            groupoid,
            unit_fibers,
            fiber_dims,
            mult,
            star,
            tol: *tol,
        }))
    }

    /// Section values for a named section, shaped for the given bundle.
    pub fn section_values(
        &self,
        name: &str,
        bundle: &FellBundle,
    ) -> Result<Vec<Vec<Complex64>>, BundleError> {
        let entries = self
            .sections
            .get(name)
            .ok_or_else(|| BundleError::NoSuchSection { name: name.to_string() })?;
        let mut values: Vec<Vec<Complex64>> = (0..bundle.groupoid().n_elements())
            .map(|g| vec![Complex64::new(0.0, 0.0); bundle.fiber_dim(g)])
            .collect();
        for (&g, coords) in entries {
            values[g] = coords.clone();
        }
        Ok(values)
    }

    /// Describe an existing bundle (with named sections) as a document.
    /// Unit fibers must have been built as block-diagonal algebras; the
    /// format cannot express arbitrary matrix *-algebras.
    pub fn from_bundle(
        bundle: &FellBundle,
        sections: &[(&str, &Section<'_>)],
    ) -> Result<BundleDocument, BundleError> {
        let g = bundle.groupoid();
        let mut doc = BundleDocument {
            n_elements: g.n_elements(),
            units: g.units().to_vec(),
            range_of: (0..g.n_elements()).map(|x| g.range_of(x)).collect(),
            source_of: (0..g.n_elements()).map(|x| g.source_of(x)).collect(),
            inverse_of: (0..g.n_elements()).map(|x| g.inverse_unchecked(x)).collect(),
            compose: Vec::new(),
            ..Default::default()
        };
        for a in 0..g.n_elements() {
            for b in 0..g.n_elements() {
                if let Some(c) = g.compose_unchecked(a, b) {
                    doc.compose.push((a, b, c));
                }
            }
        }
        for (&u, alg) in bundle.unit_fibers() {
            let blocks = alg.blocks().ok_or_else(|| BundleError::MalformedStructure {
                detail: format!(
                    "unit fiber at {u} is not a block-diagonal algebra; it cannot be serialized"
                ),
            })?;
            doc.unit_blocks.insert(u, blocks.to_vec());
        }
        for x in 0..g.n_elements() {
            if !g.is_unit(x) {
                doc.arrow_dims.insert(x, bundle.fiber_dim(x));
            }
        }
        for &(a, b, _) in &doc.compose.clone() {
            if g.is_unit(a) && g.is_unit(b) {
                continue;
            }
            let Some(tensor) = bundle.mult_tensor(a, b) else { continue };
            let mut coeffs = Vec::new();
            for i in 0..tensor.left_dim() {
                for j in 0..tensor.right_dim() {
                    for k in 0..tensor.out_dim() {
                        let v = tensor.get(i, j, k);
                        if v != Complex64::new(0.0, 0.0) {
                            coeffs.push((i, j, k, v));
                        }
                    }
                }
            }
            if !coeffs.is_empty() {
                doc.mult_coeffs.insert((a, b), coeffs);
            }
        }
        for x in 0..g.n_elements() {
            if g.is_unit(x) {
                continue;
            }
            let Some(s) = bundle.star_tensor(x) else { continue };
            let mut coeffs = Vec::new();
            for r in 0..s.rows() {
                for c in 0..s.cols() {
                    let v = s.get(r, c);
                    if v != Complex64::new(0.0, 0.0) {
                        coeffs.push((r, c, v));
                    }
                }
            }
            if !coeffs.is_empty() {
                doc.star_coeffs.insert(x, coeffs);
            }
        }
        for (name, section) in sections {
            let mut entries = BTreeMap::new();
            for gamma in section.support() {
                entries.insert(gamma, section.value(gamma).to_vec());
            }
            if !entries.is_empty() {
                doc.sections.insert(name.to_string(), entries);
            }
        }
        normalize(&mut doc);
        Ok(doc)
    }
}

fn algebra_mult_tensor(alg: &MatrixStarAlgebra) -> MultTensor {
    let k = alg.dim();
    let mut t = MultTensor::zero(k, k, k);
    for i in 0..k {
        for j in 0..k {
            for (c, &v) in alg.product_coords(i, j).iter().enumerate() {
                t.set(i, j, c, v);
            }
        }
    }
    t
}

fn algebra_star_matrix(alg: &MatrixStarAlgebra) -> ComplexMatrix {
    let k = alg.dim();
    let mut s = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for (r, &v) in alg.star_basis_coords(i).iter().enumerate() {
            s.set(r, i, v);
        }
    }
    s
}

/// Serialize a representation as `(basis-section id, matrix)` pairs in
/// the same lexical conventions as bundle files.
pub fn emit_representation(rep: &StarRepresentation<'_>) -> String {
    let mut out = String::new();
    out.push_str(&format!("representation dim {}\n", rep.hilbert_dim()));
    for (&(gamma, i), m) in rep.images() {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                let v = m.get(r, c);
                if v != Complex64::new(0.0, 0.0) {
                    out.push_str(&format!(
                        "image {gamma} {i} {r} {c} {}\n",
                        format_complex(v)
                    ));
                }
            }
        }
    }
    out
}

/// Parse a representation for the given bundle.
pub fn parse_representation<'a>(
    text: &str,
    bundle: &'a FellBundle,
) -> Result<StarRepresentation<'a>, ParseError> {
    let mut dim: Option<usize> = None;
    let mut images: BTreeMap<(usize, usize), ComplexMatrix> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        match tokens[0].text {
            "representation" => {
                if tokens.len() != 3 || tokens[1].text != "dim" {
                    return err(line, tokens[0].col, "expected `representation dim <n>`");
                }
                dim = Some(parse_usize(&tokens[2], line, "dimension")?);
            }
            "image" => {
                let Some(d) = dim else {
                    return err(line, tokens[0].col, "image line before `representation dim`");
                };
                if tokens.len() != 6 {
                    return err(line, tokens[0].col, "expected `image <g> <i> <row> <col> <re,im>`");
                }
                let gamma = parse_usize(&tokens[1], line, "element index")?;
                if gamma >= bundle.groupoid().n_elements() {
                    return err(line, tokens[1].col, format!("element {gamma} out of range"));
                }
                let i = parse_usize(&tokens[2], line, "basis index")?;
                if i >= bundle.fiber_dim(gamma) {
                    return err(line, tokens[2].col, format!("basis index {i} out of range"));
                }
                let r = parse_usize(&tokens[3], line, "row")?;
                let c = parse_usize(&tokens[4], line, "column")?;
                if r >= d || c >= d {
                    return err(line, tokens[3].col, format!("matrix entry ({r},{c}) out of range (dimension {d})"));
                }
                let v = parse_complex(&tokens[5], line)?;
                images
                    .entry((gamma, i))
                    .or_insert_with(|| ComplexMatrix::zeros(d, d))
                    .set(r, c, v);
            }
            other => return err(line, tokens[0].col, format!("unknown key {other:?}")),
        }
    }
    let Some(d) = dim else {
        return err(1, 1, "empty representation document");
    };
    for gamma in 0..bundle.groupoid().n_elements() {
        for i in 0..bundle.fiber_dim(gamma) {
            images
                .entry((gamma, i))
                .or_insert_with(|| ComplexMatrix::zeros(d, d));
        }
    }
    StarRepresentation::new(bundle, d, images).map_err(|e| ParseError {
        line: 1,
        col: 1,
        message: e.to_string(),
    })
}
