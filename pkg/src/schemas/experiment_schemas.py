"""Available params:
'type':(class,),
'default': any,
'min_value': number,
'max_value': number,
'choices': (value,),
'f_level_type': (class,)
"""

from config import DEFAULT_TEST_EPISODES, THREADS
from protocols.method_schemas import Init, Method
from shared.base_input_dto import BaseDTO


METHOD_NAMES = tuple(method.value for method in Method)
INIT_NAMES = tuple(init.value for init in Init)
REPORT_FORMATS = ('json', 'csv')
SPLIT_NAMES = ('train', 'val', 'test')


class TrainDTO(BaseDTO):
    method = {'type': (str,), 'choices': METHOD_NAMES}
    manifest = {'type': (str,)}
    init = {'type': (str,), 'default': 'scratch', 'choices': INIT_NAMES}
    pretrain_manifest = {'type': (str,), 'default': None}
    seed = {'type': (int,), 'default': 0, 'min_value': 0}
    out = {'type': (str,)}
    overrides = {'type': (dict,), 'default': {}}


class EvalDTO(BaseDTO):
    ckpt = {'type': (str,)}
    manifest = {'type': (str,)}
    way = {'type': (int,), 'default': None, 'min_value': 2}
    shot = {'type': (int,), 'default': None, 'min_value': 1}
    episodes = {'type': (int,), 'default': DEFAULT_TEST_EPISODES, 'min_value': 1}
    seed = {'type': (int,), 'default': 0, 'min_value': 0}
    split = {'type': (str,), 'default': 'test', 'choices': SPLIT_NAMES}
    finetune_iters = {'type': (int,), 'default': None, 'min_value': 0}
    threads = {'type': (int,), 'default': THREADS, 'min_value': 0}
    report = {'type': (str,), 'default': None}
    format = {'type': (str,), 'default': 'json', 'choices': REPORT_FORMATS}
    with_timing = {'type': (bool,), 'default': False}


class CompareDTO(BaseDTO):
    methods = {'type': (list,), 'f_level_type': (str,)}
    manifest = {'type': (str,)}
    init = {'type': (str,), 'default': 'scratch', 'choices': INIT_NAMES}
    pretrain_manifest = {'type': (str,), 'default': None}
    way = {'type': (int,), 'default': 5, 'min_value': 2}
    shot = {'type': (int,), 'default': 1, 'min_value': 1}
    episodes = {'type': (int,), 'default': DEFAULT_TEST_EPISODES, 'min_value': 1}
    seed = {'type': (int,), 'default': 0, 'min_value': 0}
    threads = {'type': (int,), 'default': THREADS, 'min_value': 0}
    overrides = {'type': (dict,), 'default': {}}
    report = {'type': (str,), 'default': None}
    format = {'type': (str,), 'default': 'json', 'choices': REPORT_FORMATS}
    with_timing = {'type': (bool,), 'default': False}


class SelftestDTO(BaseDTO):
    seed = {'type': (int,), 'default': 0, 'min_value': 0}
    grad_points = {'type': (int,), 'default': 100, 'min_value': 1}
