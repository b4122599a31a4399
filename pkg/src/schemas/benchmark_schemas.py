"""Available params:
'type':(class,),
'default': any,
'min_value': number,
'max_value': number,
'choices': (value,),
'f_level_type': (class,)
"""

from shared.base_input_dto import BaseDTO


class GenBenchmarkDTO(BaseDTO):
    spec = {'type': (str,)}
    out = {'type': (str,)}


class BuildSplitsDTO(BaseDTO):
    manifest = {'type': (str,)}
    classes = {'type': (list,), 'f_level_type': (int,)}
    cap = {'type': (int,), 'default': None, 'min_value': 1}
    seed = {'type': (int,), 'default': 0, 'min_value': 0}
    out = {'type': (str,), 'default': None}
