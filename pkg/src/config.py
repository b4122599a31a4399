import os
from pathlib import Path

from dotenv import load_dotenv, find_dotenv


ENVIRONMENT = os.getenv('ENVIRONMENT', 'dev')


if ENVIRONMENT == 'dev':
    load_dotenv(find_dotenv(f'.env.{ENVIRONMENT}'))

DEBUG = bool(os.getenv('DEBUG', None))

BASE_DIR = Path(__file__).resolve().parent

LOG_LEVEL = os.getenv('FSVC_LOG_LEVEL', 'INFO')

# worker cap for episode evaluation, 0 = serial
THREADS = int(os.getenv('FSVC_THREADS', 0))

# desk-scale defaults
DEFAULT_FRAME_COUNT = int(os.getenv('FSVC_FRAME_COUNT', 8))
DEFAULT_FEATURE_DIM = int(os.getenv('FSVC_FEATURE_DIM', 32))
DEFAULT_EMBED_DIM = int(os.getenv('FSVC_EMBED_DIM', 16))
DEFAULT_PROTOTYPE_LENGTH = int(os.getenv('FSVC_PROTOTYPE_LENGTH', 32))
DEFAULT_TEST_EPISODES = int(os.getenv('FSVC_TEST_EPISODES', 10000))
DEFAULT_TAU = float(os.getenv('FSVC_TAU', 10.0))
DEFAULT_DROPOUT = float(os.getenv('FSVC_DROPOUT', 0.5))
DEFAULT_SALIENCY_HEADS = int(os.getenv('FSVC_SALIENCY_HEADS', 4))
DEFAULT_ADAPT_ITERS = int(os.getenv('FSVC_ADAPT_ITERS', 100))

FEATURE_FILE_SUFFIX = '.fsvf'
MANIFEST_NAME = 'manifest.json'
PRETRAIN_MANIFEST_NAME = 'pretrain_manifest.json'
