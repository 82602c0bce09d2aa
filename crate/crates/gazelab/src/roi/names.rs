//! Descriptive colour naming: nearest entry of the bundled web-colour table
//! by Euclidean distance in CIELAB (D65).
//!
//! CIELAB rather than RGB because the names are for humans: perceptual
//! distance picks "linen" for a warm off-white where RGB distance might pick
//! a grey.

use crate::roi::RoiError;

/// The 148 standard web colour names with their sRGB values, sorted by name.
/// A fixed, universally recognised vocabulary; project-specific names (like
/// "eggshell white") map onto their nearest entry.
const COLOUR_TABLE: [(&str, [u8; 3]); 148] = [
    ("aliceblue", [240, 248, 255]),
    ("antiquewhite", [250, 235, 215]),
    ("aqua", [0, 255, 255]),
    ("aquamarine", [127, 255, 212]),
    ("azure", [240, 255, 255]),
    ("beige", [245, 245, 220]),
    ("bisque", [255, 228, 196]),
    ("black", [0, 0, 0]),
    ("blanchedalmond", [255, 235, 205]),
    ("blue", [0, 0, 255]),
    ("blueviolet", [138, 43, 226]),
    ("brown", [165, 42, 42]),
    ("burlywood", [222, 184, 135]),
    ("cadetblue", [95, 158, 160]),
    ("chartreuse", [127, 255, 0]),
    ("chocolate", [210, 105, 30]),
    ("coral", [255, 127, 80]),
    ("cornflowerblue", [100, 149, 237]),
    ("cornsilk", [255, 248, 220]),
    ("crimson", [220, 20, 60]),
    ("cyan", [0, 255, 255]),
    ("darkblue", [0, 0, 139]),
    ("darkcyan", [0, 139, 139]),
    ("darkgoldenrod", [184, 134, 11]),
    ("darkgray", [169, 169, 169]),
    ("darkgreen", [0, 100, 0]),
    ("darkgrey", [169, 169, 169]),
    ("darkkhaki", [189, 183, 107]),
    ("darkmagenta", [139, 0, 139]),
    ("darkolivegreen", [85, 107, 47]),
    ("darkorange", [255, 140, 0]),
    ("darkorchid", [153, 50, 204]),
    ("darkred", [139, 0, 0]),
    ("darksalmon", [233, 150, 122]),
    ("darkseagreen", [143, 188, 143]),
    ("darkslateblue", [72, 61, 139]),
    ("darkslategray", [47, 79, 79]),
    ("darkslategrey", [47, 79, 79]),
    ("darkturquoise", [0, 206, 209]),
    ("darkviolet", [148, 0, 211]),
    ("deeppink", [255, 20, 147]),
    ("deepskyblue", [0, 191, 255]),
    ("dimgray", [105, 105, 105]),
    ("dimgrey", [105, 105, 105]),
    ("dodgerblue", [30, 144, 255]),
    ("firebrick", [178, 34, 34]),
    ("floralwhite", [255, 250, 240]),
    ("forestgreen", [34, 139, 34]),
    ("fuchsia", [255, 0, 255]),
    ("gainsboro", [220, 220, 220]),
    ("ghostwhite", [248, 248, 255]),
    ("gold", [255, 215, 0]),
    ("goldenrod", [218, 165, 32]),
    ("gray", [128, 128, 128]),
    ("green", [0, 128, 0]),
    ("greenyellow", [173, 255, 47]),
    ("grey", [128, 128, 128]),
    ("honeydew", [240, 255, 240]),
    ("hotpink", [255, 105, 180]),
    ("indianred", [205, 92, 92]),
    ("indigo", [75, 0, 130]),
    ("ivory", [255, 255, 240]),
    ("khaki", [240, 230, 140]),
    ("lavender", [230, 230, 250]),
    ("lavenderblush", [255, 240, 245]),
    ("lawngreen", [124, 252, 0]),
    ("lemonchiffon", [255, 250, 205]),
    ("lightblue", [173, 216, 230]),
    ("lightcoral", [240, 128, 128]),
    ("lightcyan", [224, 255, 255]),
    ("lightgoldenrodyellow", [250, 250, 210]),
    ("lightgray", [211, 211, 211]),
    ("lightgreen", [144, 238, 144]),
    ("lightgrey", [211, 211, 211]),
    ("lightpink", [255, 182, 193]),
    ("lightsalmon", [255, 160, 122]),
    ("lightseagreen", [32, 178, 170]),
    ("lightskyblue", [135, 206, 250]),
    ("lightslategray", [119, 136, 153]),
    ("lightslategrey", [119, 136, 153]),
    ("lightsteelblue", [176, 196, 222]),
    ("lightyellow", [255, 255, 224]),
    ("lime", [0, 255, 0]),
    ("limegreen", [50, 205, 50]),
    ("linen", [250, 240, 230]),
    ("magenta", [255, 0, 255]),
    ("maroon", [128, 0, 0]),
    ("mediumaquamarine", [102, 205, 170]),
    ("mediumblue", [0, 0, 205]),
    ("mediumorchid", [186, 85, 211]),
    ("mediumpurple", [147, 112, 219]),
    ("mediumseagreen", [60, 179, 113]),
    ("mediumslateblue", [123, 104, 238]),
    ("mediumspringgreen", [0, 250, 154]),
    ("mediumturquoise", [72, 209, 204]),
    ("mediumvioletred", [199, 21, 133]),
    ("midnightblue", [25, 25, 112]),
    ("mintcream", [245, 255, 250]),
    ("mistyrose", [255, 228, 225]),
    ("moccasin", [255, 228, 181]),
    ("navajowhite", [255, 222, 173]),
    ("navy", [0, 0, 128]),
    ("oldlace", [253, 245, 230]),
    ("olive", [128, 128, 0]),
    ("olivedrab", [107, 142, 35]),
    ("orange", [255, 165, 0]),
    ("orangered", [255, 69, 0]),
    ("orchid", [218, 112, 214]),
    ("palegoldenrod", [238, 232, 170]),
    ("palegreen", [152, 251, 152]),
    ("paleturquoise", [175, 238, 238]),
    ("palevioletred", [219, 112, 147]),
    ("papayawhip", [255, 239, 213]),
    ("peachpuff", [255, 218, 185]),
    ("peru", [205, 133, 63]),
    ("pink", [255, 192, 203]),
    ("plum", [221, 160, 221]),
    ("powderblue", [176, 224, 230]),
    ("purple", [128, 0, 128]),
    ("rebeccapurple", [102, 51, 153]),
    ("red", [255, 0, 0]),
    ("rosybrown", [188, 143, 143]),
    ("royalblue", [65, 105, 225]),
    ("saddlebrown", [139, 69, 19]),
    ("salmon", [250, 128, 114]),
    ("sandybrown", [244, 164, 96]),
    ("seagreen", [46, 139, 87]),
    ("seashell", [255, 245, 238]),
    ("sienna", [160, 82, 45]),
    ("silver", [192, 192, 192]),
    ("skyblue", [135, 206, 235]),
    ("slateblue", [106, 90, 205]),
    ("slategray", [112, 128, 144]),
    ("slategrey", [112, 128, 144]),
    ("snow", [255, 250, 250]),
    ("springgreen", [0, 255, 127]),
    ("steelblue", [70, 130, 180]),
    ("tan", [210, 180, 140]),
    ("teal", [0, 128, 128]),
    ("thistle", [216, 191, 216]),
    ("tomato", [255, 99, 71]),
    ("turquoise", [64, 224, 208]),
    ("violet", [238, 130, 238]),
    ("wheat", [245, 222, 179]),
    ("white", [255, 255, 255]),
    ("whitesmoke", [245, 245, 245]),
    ("yellow", [255, 255, 0]),
    ("yellowgreen", [154, 205, 50]),
];

/// The bundled name table.
pub fn web_colour_table() -> &'static [(&'static str, [u8; 3])] {
    &COLOUR_TABLE
}

/// Parses `#RRGGBB` (case-insensitive).
pub fn parse_hex(hex: &str) -> Result<[u8; 3], RoiError> {
    let bad = || RoiError::BadHex(hex.to_string());
    let body = hex.strip_prefix('#').ok_or_else(bad)?;
    if body.len() != 6 {
        return Err(bad());
    }
    let mut rgb = [0u8; 3];
    for (i, slot) in rgb.iter_mut().enumerate() {
        *slot = u8::from_str_radix(&body[2 * i..2 * i + 2], 16).map_err(|_| bad())?;
    }
    Ok(rgb)
}

/// sRGB (8-bit, D65) to CIELAB.
pub fn rgb_to_lab(rgb: [u8; 3]) -> [f64; 3] {
    fn linearize(c: u8) -> f64 {
        let c = c as f64 / 255.0;
        if c <= 0.04045 {
            c / 12.92
        } else {
            ((c + 0.055) / 1.055).powf(2.4)
        }
    }
    let r = linearize(rgb[0]);
    let g = linearize(rgb[1]);
    let b = linearize(rgb[2]);
    // sRGB → XYZ (D65 primaries).
    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    // XYZ → Lab with the D65 white point.
    const WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];
    fn f(t: f64) -> f64 {
        const DELTA: f64 = 6.0 / 29.0;
        if t > DELTA * DELTA * DELTA {
            t.cbrt()
        } else {
            t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
        }
    }
    let fx = f(x / WHITE[0]);
    let fy = f(y / WHITE[1]);
    let fz = f(z / WHITE[2]);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

fn lab_distance_sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// The table name nearest to `rgb` in Lab. Only a strictly smaller distance
/// replaces the running best, so with a name-sorted table exact ties resolve
/// to the lexicographically first name.
pub fn name_colour<'a>(rgb: [u8; 3], table: &[(&'a str, [u8; 3])]) -> &'a str {
    let lab = rgb_to_lab(rgb);
    let mut best: (&'a str, f64) = ("", f64::INFINITY);
    for (name, entry) in table {
        let d = lab_distance_sq(lab, rgb_to_lab(*entry));
        if d < best.1 {
            best = (name, d);
        }
    }
    best.0
}

/// Names every hex colour in the list. Fails on the first malformed entry.
pub fn name_colours(hexes: &[String], table: &[(&str, [u8; 3])]) -> Result<Vec<String>, RoiError> {
    hexes
        .iter()
        .map(|hex| Ok(name_colour(parse_hex(hex)?, table).to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        assert_eq!(COLOUR_TABLE.len(), 148);
        // Sorted by name, so the tie-break convention is well-defined.
        assert!(COLOUR_TABLE.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn exact_entry_names_itself() {
        assert_eq!(name_colour([255, 0, 0], web_colour_table()), "red");
        assert_eq!(name_colour([0, 128, 128], web_colour_table()), "teal");
    }

    #[test]
    fn near_black_is_black() {
        assert_eq!(name_colour([0, 0, 1], web_colour_table()), "black");
    }

    #[test]
    fn warm_offwhite_maps_to_linen() {
        // The closest bundled stand-in for an "eggshell white" style colour.
        let names = name_colours(&["#EAE0D5".to_string()], web_colour_table()).unwrap();
        assert_eq!(names, ["linen"]);
    }

    #[test]
    fn duplicate_rgb_ties_break_alphabetically() {
        // aqua and cyan are both (0, 255, 255); aqua sorts first.
        assert_eq!(name_colour([0, 255, 255], web_colour_table()), "aqua");
        // gray and grey are both (128, 128, 128).
        assert_eq!(name_colour([128, 128, 128], web_colour_table()), "gray");
    }

    #[test]
    fn malformed_hex_rejected() {
        for bad in ["#GGGGGG", "EAE0D5", "#FFF", "#12345", "#1234567"] {
            assert!(parse_hex(bad).is_err(), "{bad} should fail");
        }
        assert!(name_colours(&["#GGGGGG".to_string()], web_colour_table()).is_err());
    }

    #[test]
    fn hex_parse_is_case_insensitive() {
        assert_eq!(parse_hex("#eae0d5").unwrap(), [0xEA, 0xE0, 0xD5]);
        assert_eq!(parse_hex("#EAE0D5").unwrap(), [0xEA, 0xE0, 0xD5]);
    }

    #[test]
    fn lab_reference_values() {
        // Known CIELAB values for sRGB primaries under D65.
        let white = rgb_to_lab([255, 255, 255]);
        assert!((white[0] - 100.0).abs() < 1e-3);
        assert!(white[1].abs() < 1e-3 && white[2].abs() < 1e-3);
        let black = rgb_to_lab([0, 0, 0]);
        assert!(black[0].abs() < 1e-9);
        let red = rgb_to_lab([255, 0, 0]);
        assert!((red[0] - 53.2408).abs() < 1e-3);
        assert!((red[1] - 80.0925).abs() < 1e-3);
        assert!((red[2] - 67.2032).abs() < 1e-3);
    }
}
