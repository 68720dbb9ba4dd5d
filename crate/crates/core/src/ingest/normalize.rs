use unicode_normalization::UnicodeNormalization;

/// Canonical text form used for storage, segmentation and substring matching:
/// NFC, LF line endings, single spaces, at most one blank line in a row, and
/// no leading/trailing whitespace on the whole text or on any line.
pub fn normalize_text(raw: &str) -> String {
    let nfc: String = raw.nfc().collect();
    let unified = nfc.replace("\r\n", "\n").replace('\r', "\n");

    let mut out = String::with_capacity(unified.len());
    let mut newlines = 0usize;
    let mut pending_space = false;
    for c in unified.chars() {
        if c == '\n' {
            newlines += 1;
            pending_space = false;
        } else if c.is_whitespace() {
            pending_space = true;
        } else {
            if !out.is_empty() {
                if newlines > 0 {
                    out.push_str(if newlines >= 2 { "\n\n" } else { "\n" });
                } else if pending_space {
                    out.push(' ');
                }
            }
            newlines = 0;
            pending_space = false;
            out.push(c);
        }
    }
    out
}
