//! Line-oriented script format.
//!
//! Every non-blank line that is not a `#` comment is a directive
//! `[head key=value ...] key=value ...`. Values may contain balanced
//! brackets, braces and parentheses, or be double-quoted. Attributes are
//! separated by whitespace or commas at nesting depth zero.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Directive {
    pub line: usize,
    pub head: String,
    pub attrs: Vec<(String, String)>,
}

impl Directive {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.attrs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| self.err(format!("missing attribute `{key}`")))
    }

    pub fn kind(&self) -> Option<&str> {
        self.get("kind")
    }

    pub fn err(&self, msg: impl Into<String>) -> Error {
        Error::Script { line: self.line, msg: msg.into() }
    }

    pub fn int(&self, key: &str) -> Result<Option<i64>> {
        self.get(key)
            .map(|v| v.parse::<i64>().map_err(|_| self.err(format!("`{key}` is not an integer: {v}"))))
            .transpose()
    }

    /// Comma-separated integers, e.g. `chain=3,4,5`.
    pub fn int_list(&self, key: &str) -> Result<Option<Vec<i64>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|_| self.err(format!("bad integer list for `{key}`: {v}"))))
                    .collect()
            })
            .transpose()
    }
}

/// A parsed script: a tree of items.
#[derive(Clone, Debug)]
pub enum Item {
    Directive(Directive),
    Koszul(KoszulBlock),
    Split(SplitBlock),
}

#[derive(Clone, Debug)]
pub struct KoszulBlock {
    pub open: Directive,
    pub terms: Vec<(usize, Directive, Vec<Item>)>,
    /// `[term j=sub]`: a chain for the subspace end of the resolution
    pub sub_term: Option<(Directive, Vec<Item>)>,
    pub close: Directive,
}

#[derive(Clone, Debug)]
pub struct SplitBlock {
    pub open: Directive,
    pub sub: Vec<Item>,
    pub quotient: Vec<Item>,
    pub close: Directive,
}

pub fn tokenize(src: &str) -> Result<Vec<Directive>> {
    let mut out = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(parse_line(t, line)?);
    }
    Ok(out)
}

fn parse_line(t: &str, line: usize) -> Result<Directive> {
    let err = |msg: &str| Error::Script { line, msg: msg.to_string() };
    if !t.starts_with('[') {
        return Err(err("directive must start with `[`"));
    }
    let close = matching_close(t, 0).ok_or_else(|| err("unbalanced `[`"))?;
    let inner = &t[1..close];
    let rest = &t[close + 1..];
    let mut tokens = split_top(inner, line)?;
    if tokens.is_empty() {
        return Err(err("empty directive"));
    }
    let head = tokens.remove(0);
    if head.contains('=') {
        return Err(err("directive head must be a bare word"));
    }
    tokens.extend(split_top(rest, line)?);
    let mut attrs = Vec::new();
    for tok in tokens {
        let (k, v) = tok.split_once('=').ok_or_else(|| err(&format!("expected key=value, got `{tok}`")))?;
        let v = v.trim();
        let v = v.strip_prefix('"').and_then(|x| x.strip_suffix('"')).unwrap_or(v);
        attrs.push((k.trim().to_string(), v.to_string()));
    }
    Ok(Directive { line, head, attrs })
}

fn matching_close(s: &str, open: usize) -> Option<usize> {
    let mut depth = 0i32;
    let mut in_quote = false;
    for (i, c) in s.char_indices().skip_while(|(i, _)| *i < open) {
        match c {
            '"' => in_quote = !in_quote,
            '[' | '{' | '(' if !in_quote => depth += 1,
            ']' | '}' | ')' if !in_quote => {
                depth -= 1;
                if depth == 0 {
                    return Some(i);
                }
            }
            _ => {}
        }
    }
    None
}

/// Splits at whitespace or commas at depth zero, keeping quoted runs intact.
pub(crate) fn split_top(s: &str, line: usize) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    let mut in_quote = false;
    let chars: Vec<char> = s.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        // a comma separates attributes only when followed by whitespace, so `chain=3,4,5` stays whole
        let sep_comma = c == ',' && chars.get(i + 1).is_none_or(|n| n.is_whitespace());
        match c {
            '"' => {
                in_quote = !in_quote;
                cur.push(c);
            }
            '[' | '{' | '(' if !in_quote => {
                depth += 1;
                cur.push(c);
            }
            ']' | '}' | ')' if !in_quote => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Script { line, msg: "unbalanced closing bracket".into() });
                }
                cur.push(c);
            }
            c if !in_quote && depth == 0 && (c.is_whitespace() || sep_comma) => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            _ => cur.push(c),
        }
    }
    if in_quote || depth != 0 {
        return Err(Error::Script { line, msg: "unterminated quote or bracket".into() });
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

/// Splits a parenthesised argument list at depth-one commas.
pub(crate) fn split_args(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '[' | '{' | '(' => {
                depth += 1;
                cur.push(c);
            }
            ']' | '}' | ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => out.push(std::mem::take(&mut cur).trim().to_string()),
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

pub fn parse(src: &str) -> Result<Vec<Item>> {
    let ds = tokenize(src)?;
    let mut pos = 0;
    let items = parse_items(&ds, &mut pos, &[])?;
    if pos < ds.len() {
        return Err(ds[pos].err(format!("unexpected `{}`", ds[pos].head)));
    }
    Ok(items)
}

fn is_stop(d: &Directive, stops: &[&str]) -> bool {
    stops.contains(&d.head.as_str())
}

fn parse_items(ds: &[Directive], pos: &mut usize, stops: &[&str]) -> Result<Vec<Item>> {
    let mut items = Vec::new();
    while *pos < ds.len() {
        let d = &ds[*pos];
        if is_stop(d, stops) {
            break;
        }
        if matches!(d.head.as_str(), "term" | "part" | "end") {
            return Err(d.err(format!("`{}` outside of a block", d.head)));
        }
        *pos += 1;
        match (d.head.as_str(), d.kind()) {
            ("step", Some("koszul")) => items.push(Item::Koszul(parse_koszul(ds, pos, d.clone())?)),
            ("step", Some("split")) => items.push(Item::Split(parse_split(ds, pos, d.clone())?)),
            _ => items.push(Item::Directive(d.clone())),
        }
    }
    Ok(items)
}

fn expect_end(ds: &[Directive], pos: &mut usize, open: &Directive, kind: &str) -> Result<Directive> {
    match ds.get(*pos) {
        Some(d) if d.head == "end" && d.kind() == Some(kind) => {
            *pos += 1;
            Ok(d.clone())
        }
        Some(d) => Err(d.err(format!("expected `[end kind={kind}]`, got `{}`", d.head))),
        None => Err(open.err(format!("unterminated {kind} block"))),
    }
}

fn parse_koszul(ds: &[Directive], pos: &mut usize, open: Directive) -> Result<KoszulBlock> {
    let mut terms = Vec::new();
    let mut sub_term = None;
    while let Some(d) = ds.get(*pos) {
        if d.head != "term" {
            break;
        }
        *pos += 1;
        if d.get("j") == Some("sub") {
            if sub_term.is_some() {
                return Err(d.err("term j=sub given twice"));
            }
            let body = parse_items(ds, pos, &["term", "end", "part"])?;
            sub_term = Some((d.clone(), body));
            continue;
        }
        let j = d.int("j")?.ok_or_else(|| d.err("term needs j"))?;
        if j < 0 {
            return Err(d.err("term index must be non-negative"));
        }
        if terms.iter().any(|(k, _, _)| *k == j as usize) {
            return Err(d.err(format!("term j={j} given twice")));
        }
        let body = parse_items(ds, pos, &["term", "end", "part"])?;
        terms.push((j as usize, d.clone(), body));
    }
    let close = expect_end(ds, pos, &open, "koszul")?;
    Ok(KoszulBlock { open, terms, sub_term, close })
}

fn parse_split(ds: &[Directive], pos: &mut usize, open: Directive) -> Result<SplitBlock> {
    let mut sub = None;
    let mut quotient = None;
    while let Some(d) = ds.get(*pos) {
        if d.head != "part" {
            break;
        }
        *pos += 1;
        let body = parse_items(ds, pos, &["part", "end", "term"])?;
        match d.kind() {
            Some("sub") if sub.is_none() => sub = Some(body),
            Some("quotient") if quotient.is_none() => quotient = Some(body),
            _ => return Err(d.err("part must be `kind=sub` or `kind=quotient`, each once")),
        }
    }
    let close = expect_end(ds, pos, &open, "split")?;
    Ok(SplitBlock {
        sub: sub.ok_or_else(|| open.err("split needs a sub part"))?,
        quotient: quotient.ok_or_else(|| open.err("split needs a quotient part"))?,
        open,
        close,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_nested_values() {
        let d = tokenize("[step kind=koszul sub=[0 1 1 2 0 / 2]] note=\"a b, c\"").unwrap();
        assert_eq!(d[0].head, "step");
        assert_eq!(d[0].get("sub"), Some("[0 1 1 2 0 / 2]"));
        assert_eq!(d[0].get("note"), Some("a b, c"));
        let d = tokenize("[query] diagram=[0 0 2 2 0 / 2], offset=0, twist={0 0 0 0 0 / 0}").unwrap();
        assert_eq!(d[0].get("offset"), Some("0"));
        assert_eq!(d[0].get("twist"), Some("{0 0 0 0 0 / 0}"));
        let d = tokenize("[step kind=sommers chain=3,4,5 m=2]").unwrap();
        assert_eq!(d[0].get("chain"), Some("3,4,5"));
    }

    #[test]
    fn parses_blocks() {
        let src = "\
[query rootset=[0 0 2 2 0 / 2]]
[step kind=koszul sub=[0 1 1 2 0 / 2]]
[term j=1]
[step kind=demazure alpha=2 expect=vanish]
[end kind=koszul conclude=isomorphism]
";
        let items = parse(src).unwrap();
        assert_eq!(items.len(), 2);
        let Item::Koszul(k) = &items[1] else { panic!() };
        assert_eq!(k.terms.len(), 1);
        assert_eq!(k.terms[0].2.len(), 1);
        assert_eq!(k.close.get("conclude"), Some("isomorphism"));
    }

    #[test]
    fn rejects_stray_end() {
        assert!(parse("[end kind=koszul]").is_err());
        assert!(parse("[step kind=koszul sub=[0 0 0 0 0 / 2]]\n[term j=1]").is_err());
        assert!(parse("step").is_err());
    }

    #[test]
    fn args() {
        assert_eq!(split_args("[0 0 2 0 0 / 0],+{1 1 0 0 0 / 0}"), vec!["[0 0 2 0 0 / 0]", "+{1 1 0 0 0 / 0}"]);
    }
}
