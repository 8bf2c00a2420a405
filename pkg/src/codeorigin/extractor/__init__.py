from .config import (
    PRESETS,
    ClassRename,
    PreprocessConfig,
    RenameMap,
    apply_config,
    counterpart_rename_map,
    preset,
    read_rename_map,
    write_rename_map,
)
from .lexer import CodeToken, TokenKind, get_lexer, lex_java
from .rules import (
    declared_package,
    has_package_declaration,
    import_names,
    primary_class_name,
    rename_primary_class,
    strip_all_imports,
    strip_comments,
    strip_formatting,
    strip_package_declaration,
    strip_self_imports,
)

__all__ = [
    "PRESETS",
    "ClassRename",
    "CodeToken",
    "PreprocessConfig",
    "RenameMap",
    "TokenKind",
    "apply_config",
    "counterpart_rename_map",
    "declared_package",
    "get_lexer",
    "has_package_declaration",
    "import_names",
    "lex_java",
    "preset",
    "primary_class_name",
    "read_rename_map",
    "rename_primary_class",
    "strip_all_imports",
    "strip_comments",
    "strip_formatting",
    "strip_package_declaration",
    "strip_self_imports",
    "write_rename_map",
]
