import pathlib
import re

import pytest


tutorials_dir = pathlib.Path(__file__).parent.parent.parent / "tutorials"
tutorial_py_files = sorted(tutorials_dir.glob("./**/*.py"))


patterns = [
    re.compile(r"# %% \[markdown\]\n"),  # check comment block
    re.compile(r"# %%\n"),  # check python block
]

docstring_start_pattern = re.compile(r'# %% \[markdown\]\n"""\n#(?: .*:)? \d+\. .*\n(?:\n[\S\s]*)?"""(?:  # .*)?\n')


def regexp_format_checker(tutorial_py_file: pathlib.Path):
    text = tutorial_py_file.read_text()
    for pattern in patterns:
        if not pattern.search(text):
            raise Exception(
                f"Pattern `{pattern}` is not found in `{tutorial_py_file.relative_to(tutorials_dir.parent)}`."
            )
    return True


def notebook_start_checker(tutorial_py_file: pathlib.Path):
    result = docstring_start_pattern.search(tutorial_py_file.read_text())
    if result is None:
        raise Exception(
            f"Tutorial `{tutorial_py_file.relative_to(tutorials_dir.parent)}` does not have an initial "
            "markdown section. Notebook header should be prefixed with a single '# %% [markdown]'."
        )
    return result.start() == 0


format_checkers = [regexp_format_checker, notebook_start_checker]


@pytest.mark.parametrize("tutorial_py_file", tutorial_py_files, ids=lambda path: path.name)
def test_format(tutorial_py_file: pathlib.Path):
    current_path = tutorial_py_file.relative_to(tutorials_dir.parent)
    for checker in format_checkers:
        assert checker(tutorial_py_file), f"Tutorial {current_path} didn't pass formatting checks!"
