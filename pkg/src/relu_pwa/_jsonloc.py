"""JSON loading that remembers the source line of every object and array.

Uses the pure-Python scanner from :mod:`json.scanner` with wrapped
object/array parsers, so error messages can point at the offending line.
"""
import json
import json.decoder
import json.scanner


class LocatedDict(dict):
    line = 0


class LocatedList(list):
    line = 0


def _line_of(s, idx):
    return s.count("\n", 0, idx) + 1


class _LocatingDecoder(json.JSONDecoder):
    def __init__(self):
        super().__init__()

        def parse_object(s_and_end, *args, **kwargs):
            s, end = s_and_end
            obj, new_end = json.decoder.JSONObject(s_and_end, *args, **kwargs)
            out = LocatedDict(obj)
            out.line = _line_of(s, end - 1)
            return out, new_end

        def parse_array(s_and_end, scan_once, *args, **kwargs):
            s, end = s_and_end
            arr, new_end = json.decoder.JSONArray(s_and_end, scan_once, *args, **kwargs)
            out = LocatedList(arr)
            out.line = _line_of(s, end - 1)
            return out, new_end

        self.parse_object = parse_object
        self.parse_array = parse_array
        self.scan_once = json.scanner.py_make_scanner(self)


def loads(text: str):
    return _LocatingDecoder().decode(text)


def line_of(node, default=1) -> int:
    return getattr(node, "line", default)


def dumps(obj, indent=1, _level=0) -> str:
    """Indented JSON that keeps arrays of scalars and matrix rows on one line."""
    pad = " " * (indent * (_level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + " " * (indent * _level) + "}"
    if isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        if all(isinstance(v, list) and not any(isinstance(w, (dict, list)) for w in v) for v in obj):
            return json.dumps(obj)
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + " " * (indent * _level) + "]"
    return json.dumps(obj)
