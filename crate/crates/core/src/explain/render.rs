use std::fmt::Write as _;

use super::highlight::{Band, HighlightedDocument};
use crate::error::{Error, Result};

/// Underline colors, one per relevant class, reused in order when a document
/// has more relevant classes than colors.
pub const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> String {
    s.replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&amp;", "&")
}

fn class_name(names: &[String], k: usize) -> String {
    names.get(k).cloned().unwrap_or_else(|| format!("class {k}"))
}

const STYLE: &str = "body{font-family:serif;line-height:2.6em;max-width:50em;margin:2em auto}\n\
.doc{margin-bottom:1.5em}\n\
.u{display:inline-block;padding-bottom:2px;border-bottom-style:solid}\n\
.high{border-bottom-width:4px}\n.medium{border-bottom-width:2px;opacity:.85}\n.low{border-bottom-width:1px;opacity:.6}\n\
.legend{font-size:.9em;line-height:1.4em}\n.note{font-size:.8em;color:#555}\n";

/// A self-contained HTML page with each document's marked tokens underlined
/// in its classes' colors, thicker for higher bands.
pub fn render_html(docs: &[HighlightedDocument], class_names: &[String]) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Word importance</title>\n");
    let _ = write!(out, "<style>\n{STYLE}</style>\n</head>\n<body>\n");
    for doc in docs {
        render_document(&mut out, doc, class_names);
    }
    out.push_str("</body>\n</html>\n");
    out
}

fn render_document(out: &mut String, doc: &HighlightedDocument, class_names: &[String]) {
    let color = |class: usize| {
        let slot = doc.relevant.iter().position(|&c| c == class).unwrap_or(0);
        PALETTE[slot % PALETTE.len()]
    };
    out.push_str("<div class=\"report\">\n<p class=\"doc\">");
    for (t, token) in doc.tokens.iter().enumerate() {
        if t > 0 {
            out.push(' ');
        }
        let marks = &doc.marks[t];
        for m in marks {
            let _ = write!(
                out,
                "<span class=\"u {}\" style=\"border-bottom-color:{}\" title=\"{}\">",
                m.band.name(),
                color(m.class),
                escape(&class_name(class_names, m.class))
            );
        }
        out.push_str(&escape(token));
        for _ in marks {
            out.push_str("</span>");
        }
    }
    out.push_str("</p>\n");
    if !doc.relevant.is_empty() {
        out.push_str("<ul class=\"legend\">\n");
        for &k in &doc.relevant {
            let _ = writeln!(
                out,
                "<li><span style=\"color:{}\">&#9632;</span> {}</li>",
                color(k),
                escape(&class_name(class_names, k))
            );
        }
        out.push_str("</ul>\n");
        if doc.relevant.len() > PALETTE.len() {
            let _ = writeln!(
                out,
                "<p class=\"note\">{} classes share {} colors; colors repeat in legend order.</p>",
                doc.relevant.len(),
                PALETTE.len()
            );
        }
    }
    out.push_str("</div>\n");
}

/// Recovers each document's tokens from a page made by [`render_html`].
pub fn tokens_from_markup(html: &str) -> Result<Vec<Vec<String>>> {
    const OPEN: &str = "<p class=\"doc\">";
    let mut docs = Vec::new();
    let mut rest = html;
    while let Some(start) = rest.find(OPEN) {
        let body = &rest[start + OPEN.len()..];
        let end = body
            .find("</p>")
            .ok_or_else(|| Error::parse("highlight markup", "unterminated document"))?;
        let mut text = String::new();
        let mut in_tag = false;
        for c in body[..end].chars() {
            match c {
                '<' => in_tag = true,
                '>' => in_tag = false,
                c if !in_tag => text.push(c),
                _ => {}
            }
        }
        docs.push(text.split_whitespace().map(unescape).collect());
        rest = &body[end..];
    }
    Ok(docs)
}

fn band_letter(b: Band) -> char {
    match b {
        Band::High => 'H',
        Band::Medium => 'M',
        Band::Low => 'L',
    }
}

/// Plain-text rendering: a marked token is followed by `[n:B,...]` where `n`
/// numbers the document's relevant classes and `B` is H, M or L.
pub fn render_terminal(doc: &HighlightedDocument, class_names: &[String]) -> String {
    let slot = |class: usize| doc.relevant.iter().position(|&c| c == class).unwrap_or(0) + 1;
    let words: Vec<String> = doc
        .tokens
        .iter()
        .zip(&doc.marks)
        .map(|(tok, marks)| {
            if marks.is_empty() {
                tok.clone()
            } else {
                let tags: Vec<String> = marks
                    .iter()
                    .map(|m| format!("{}:{}", slot(m.class), band_letter(m.band)))
                    .collect();
                format!("{tok}[{}]", tags.join(","))
            }
        })
        .collect();
    let mut out = words.join(" ");
    out.push('\n');
    for &k in &doc.relevant {
        let _ = writeln!(out, "  {} = {}", slot(k), class_name(class_names, k));
    }
    out
}
