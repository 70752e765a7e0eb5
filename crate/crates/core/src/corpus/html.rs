//! Tag-stripping text extraction.
//!
//! This is a small state machine, not a DOM parser. It keeps visible text,
//! drops `<script>`/`<style>` bodies and comments, and collects the
//! `content` attribute of `<meta name="description">` tags, which is appended
//! after the body text.

/// Extract plain text from an HTML fragment or plain string.
///
/// Body text comes first, then any meta-description contents, separated by
/// single spaces. Whitespace runs are collapsed.
pub fn extract_text(raw_html: &str) -> String {
    let mut body = String::with_capacity(raw_html.len());
    let mut meta: Vec<String> = Vec::new();
    let mut rest = raw_html;

    while let Some(lt) = rest.find('<') {
        push_text(&mut body, &rest[..lt]);
        let after = &rest[lt..];

        if let Some(comment) = after.strip_prefix("<!--") {
            rest = match comment.find("-->") {
                Some(end) => &comment[end + 3..],
                None => "",
            };
            continue;
        }

        let Some(gt) = find_tag_end(after) else {
            // Unterminated tag: treat the remainder as text.
            push_text(&mut body, after);
            rest = "";
            break;
        };
        let tag = &after[1..gt];
        rest = &after[gt + 1..];
        body.push(' ');

        let name = tag_name(tag);
        if name.is_empty() {
            continue;
        }
        match name.as_str() {
            "script" | "style" if !tag.starts_with('/') => {
                rest = skip_raw_element(rest, &name);
            }
            "meta" => {
                if let Some(content) = meta_description(tag) {
                    meta.push(decode_entities(&content));
                }
            }
            _ => {}
        }
    }
    push_text(&mut body, rest);

    let mut out = collapse_whitespace(&body);
    for m in meta {
        let m = collapse_whitespace(&m);
        if m.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&m);
    }
    out
}

fn push_text(buf: &mut String, text: &str) {
    if text.contains('&') {
        buf.push_str(&decode_entities(text));
    } else {
        buf.push_str(text);
    }
}

/// Index of the `>` closing the tag starting at `s[0] == '<'`, honoring quotes.
fn find_tag_end(s: &str) -> Option<usize> {
    let mut quote: Option<char> = None;
    for (i, ch) in s.char_indices().skip(1) {
        match (quote, ch) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '"') | (None, '\'') => quote = Some(ch),
            (None, '>') => return Some(i),
            _ => {}
        }
    }
    None
}

fn tag_name(tag: &str) -> String {
    tag.trim_start_matches('/')
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase()
}

fn skip_raw_element<'a>(rest: &'a str, name: &str) -> &'a str {
    let close = format!("</{name}");
    let lower = rest.to_ascii_lowercase();
    match lower.find(&close) {
        Some(pos) => {
            let tail = &rest[pos..];
            match tail.find('>') {
                Some(gt) => &tail[gt + 1..],
                None => "",
            }
        }
        None => "",
    }
}

fn meta_description(tag: &str) -> Option<String> {
    let attrs = parse_attrs(tag);
    let is_description = attrs.iter().any(|(k, v)| {
        (k == "name" || k == "property")
            && (v.eq_ignore_ascii_case("description") || v.eq_ignore_ascii_case("og:description"))
    });
    if !is_description {
        return None;
    }
    attrs.into_iter().find(|(k, _)| k == "content").map(|(_, v)| v)
}

/// Parse `key=value` attribute pairs from the inside of a tag.
fn parse_attrs(tag: &str) -> Vec<(String, String)> {
    let chars: Vec<char> = tag.chars().collect();
    let mut i = 0;
    // skip tag name
    while i < chars.len() && !chars[i].is_whitespace() {
        i += 1;
    }
    let mut out = Vec::new();
    while i < chars.len() {
        while i < chars.len() && (chars[i].is_whitespace() || chars[i] == '/') {
            i += 1;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '=' && chars[i] != '/' {
            i += 1;
        }
        if start == i {
            i += 1;
            continue;
        }
        let key: String = chars[start..i].iter().collect::<String>().to_ascii_lowercase();
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        if i >= chars.len() || chars[i] != '=' {
            out.push((key, String::new()));
            continue;
        }
        i += 1;
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        let value = if i < chars.len() && (chars[i] == '"' || chars[i] == '\'') {
            let q = chars[i];
            i += 1;
            let vs = i;
            while i < chars.len() && chars[i] != q {
                i += 1;
            }
            let v: String = chars[vs..i].iter().collect();
            i += 1;
            v
        } else {
            let vs = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            chars[vs..i].iter().collect()
        };
        out.push((key, value));
    }
    out
}

fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let decoded = tail.find(';').filter(|&semi| semi <= 10).and_then(|semi| {
            let ent = &tail[1..semi];
            let ch = match ent {
                "amp" => Some('&'),
                "lt" => Some('<'),
                "gt" => Some('>'),
                "quot" => Some('"'),
                "apos" => Some('\''),
                "nbsp" => Some(' '),
                _ => ent
                    .strip_prefix("#x")
                    .or_else(|| ent.strip_prefix("#X"))
                    .and_then(|h| u32::from_str_radix(h, 16).ok())
                    .or_else(|| ent.strip_prefix('#').and_then(|d| d.parse().ok()))
                    .and_then(char::from_u32),
            };
            ch.map(|c| (c, semi))
        });
        match decoded {
            Some((c, semi)) => {
                out.push(c);
                rest = &tail[semi + 1..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
